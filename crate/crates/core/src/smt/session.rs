//! One interactive solver process speaking SMT-LIB over stdin/stdout.

use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use super::sexp::{is_complete, parse, Sexp};
use super::{SmtConfig, SmtError};

static DUMP_COUNTER: AtomicUsize = AtomicUsize::new(0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Sat,
    Unsat,
    Unknown,
}

pub struct Session {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    timeout: Option<Duration>,
    transcript: String,
    dump_dir: Option<PathBuf>,
}

fn command_line(cfg: &SmtConfig) -> (String, Vec<String>) {
    let mut parts = cfg.solver.split_whitespace().map(str::to_string);
    let program = parts.next().unwrap_or_else(|| "z3".into());
    let mut args: Vec<String> = parts.collect();
    if args.is_empty() {
        let base = std::path::Path::new(&program).file_name().and_then(|s| s.to_str()).unwrap_or("");
        if base.starts_with("z3") {
            args = vec!["-in".into(), "-smt2".into()];
        } else if base.starts_with("cvc5") {
            args = vec!["--incremental".into(), "--lang=smt2".into()];
        }
    }
    (program, args)
}

impl Session {
    pub fn start(cfg: &SmtConfig) -> Result<Session, SmtError> {
        let (program, args) = command_line(cfg);
        let mut child = Command::new(&program)
            .args(&args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| SmtError::Spawn(format!("{program}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Session { child, stdin, lines: rx, timeout: cfg.timeout, transcript: String::new(), dump_dir: cfg.dump_dir.clone() })
    }

    pub fn send(&mut self, text: &str) -> Result<(), SmtError> {
        self.transcript.push_str(text);
        if !text.ends_with('\n') {
            self.transcript.push('\n');
        }
        self.stdin.write_all(text.as_bytes()).and_then(|_| self.stdin.write_all(b"\n")).and_then(|_| self.stdin.flush()).map_err(|e| SmtError::Protocol(format!("write failed: {e}")))
    }

    /// Reads one complete response. `None` on timeout.
    fn read_response(&mut self, deadline: Option<Instant>) -> Result<Option<Sexp>, SmtError> {
        let mut text = String::new();
        loop {
            let line = match deadline {
                Some(d) => {
                    let left = d.saturating_duration_since(Instant::now());
                    match self.lines.recv_timeout(left) {
                        Ok(l) => l,
                        Err(RecvTimeoutError::Timeout) => return Ok(None),
                        Err(RecvTimeoutError::Disconnected) => return Err(SmtError::Protocol("solver exited".into())),
                    }
                }
                None => self.lines.recv().map_err(|_| SmtError::Protocol("solver exited".into()))?,
            };
            text.push_str(&line);
            text.push('\n');
            if is_complete(&text) {
                let (s, _) = parse(&text).map_err(SmtError::Protocol)?;
                if let Some(items) = s.as_list() {
                    if items.first().and_then(Sexp::as_atom) == Some("error") {
                        let msg = items.get(1).and_then(Sexp::as_atom).unwrap_or("").trim_matches('"').to_string();
                        return Err(SmtError::Solver(msg));
                    }
                }
                return Ok(Some(s));
            }
        }
    }

    fn check_with(&mut self, cmd: &str) -> Result<Check, SmtError> {
        self.send(cmd)?;
        let deadline = self.timeout.map(|t| Instant::now() + t + Duration::from_millis(500));
        match self.read_response(deadline)? {
            None => {
                let _ = self.child.kill();
                Err(SmtError::Timeout)
            }
            Some(s) => match s.as_atom() {
                Some("sat") => Ok(Check::Sat),
                Some("unsat") => Ok(Check::Unsat),
                Some("unknown") => Ok(Check::Unknown),
                _ => Err(SmtError::Protocol(format!("unexpected answer to check-sat: {s:?}"))),
            },
        }
    }

    pub fn check_sat(&mut self) -> Result<Check, SmtError> {
        self.check_with("(check-sat)")
    }

    pub fn check_sat_assuming(&mut self, literals: &[String]) -> Result<Check, SmtError> {
        self.check_with(&format!("(check-sat-assuming ({}))", literals.join(" ")))
    }

    /// Sends a query command and reads its s-expression answer.
    pub fn query(&mut self, cmd: &str) -> Result<Sexp, SmtError> {
        self.send(cmd)?;
        self.read_response(None)?.ok_or(SmtError::Timeout)
    }

    pub fn reason_unknown(&mut self) -> String {
        match self.query("(get-info :reason-unknown)") {
            Ok(s) => s
                .as_list()
                .and_then(|xs| xs.get(1))
                .map(|x| match x {
                    Sexp::Atom(a) => a.trim_matches('"').to_string(),
                    other => format!("{other:?}"),
                })
                .unwrap_or_else(|| "solver-reported".into()),
            Err(_) => "solver-reported".into(),
        }
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        let _ = self.stdin.write_all(b"(exit)\n");
        let _ = self.stdin.flush();
        let _ = self.child.kill();
        let _ = self.child.wait();
        if let Some(dir) = &self.dump_dir {
            let n = DUMP_COUNTER.fetch_add(1, Ordering::SeqCst);
            let _ = std::fs::create_dir_all(dir);
            let _ = std::fs::write(dir.join(format!("query-{n:05}.smt2")), &self.transcript);
        }
    }
}
