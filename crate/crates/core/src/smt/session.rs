//! Interactive solver processes.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::config::SolverConfig;
use super::sexp::{self, ProtocolError, Sexp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Unsat,
    Sat,
    Unknown,
    Timeout,
    Crashed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverVerdict {
    pub kind: VerdictKind,
    pub raw: String,
    pub time: Duration,
}

impl SolverVerdict {
    fn crashed(raw: impl Into<String>, time: Duration) -> Self {
        SolverVerdict {
            kind: VerdictKind::Crashed,
            raw: raw.into(),
            time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("cannot start solver `{command}`: {message}")]
    Spawn { command: String, message: String },
    #[error("solver timed out")]
    Timeout,
    #[error("solver exited or closed its output: {0}")]
    Crashed(String),
    #[error("solver reported an error: {0}")]
    Solver(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// A running solver fed over standard input.
pub struct Session {
    config: SolverConfig,
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
    dead: bool,
    /// Everything sent so far.
    pub transcript: String,
}

impl Session {
    pub fn start(config: &SolverConfig) -> Result<Session, SessionError> {
        let (prog, args) = config.command.split_first().ok_or_else(|| SessionError::Spawn {
            command: String::new(),
            message: "empty solver command".into(),
        })?;
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| SessionError::Spawn {
                command: config.command.join(" "),
                message: e.to_string(),
            })?;
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
        let stdin = child.stdin.take();
        Ok(Session {
            config: config.clone(),
            child,
            stdin,
            lines: rx,
            dead: false,
            transcript: String::new(),
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn is_alive(&self) -> bool {
        !self.dead
    }

    /// Send commands that produce no reply.
    pub fn send(&mut self, text: &str) -> Result<(), SessionError> {
        if self.dead {
            return Err(SessionError::Crashed("session is closed".into()));
        }
        self.transcript.push_str(text);
        if !text.ends_with('\n') {
            self.transcript.push('\n');
        }
        let stdin = self.stdin.as_mut().expect("open stdin");
        let r = stdin
            .write_all(text.as_bytes())
            .and_then(|_| stdin.write_all(b"\n"))
            .and_then(|_| stdin.flush());
        r.map_err(|e| {
            self.dead = true;
            SessionError::Crashed(e.to_string())
        })
    }

    /// Read one complete reply, skipping `success` and `unsupported`.
    fn read_reply(&mut self, deadline: Instant) -> Result<Sexp, SessionError> {
        let mut buf = String::new();
        loop {
            let now = Instant::now();
            let wait = deadline.saturating_duration_since(now);
            match self.lines.recv_timeout(wait) {
                Ok(line) => {
                    buf.push_str(&line);
                    buf.push('\n');
                    if !sexp::is_complete(&buf) {
                        continue;
                    }
                    let reply = sexp::parse_one(&buf)?;
                    buf.clear();
                    match reply.as_atom() {
                        Some("success" | "unsupported") => continue,
                        _ => return Ok(reply),
                    }
                }
                Err(RecvTimeoutError::Timeout) => {
                    self.kill();
                    return Err(SessionError::Timeout);
                }
                Err(RecvTimeoutError::Disconnected) => {
                    self.dead = true;
                    return Err(SessionError::Crashed(buf));
                }
            }
        }
    }

    pub fn check_sat(&mut self) -> SolverVerdict {
        let start = Instant::now();
        if let Err(e) = self.send("(check-sat)") {
            return SolverVerdict::crashed(e.to_string(), start.elapsed());
        }
        let reply = self.read_reply(start + self.config.timeout);
        let time = start.elapsed();
        match reply {
            Ok(s) => {
                let raw = s.to_string();
                let kind = match s.as_atom() {
                    Some("sat") => VerdictKind::Sat,
                    Some("unsat") => VerdictKind::Unsat,
                    Some("unknown" | "timeout") => VerdictKind::Unknown,
                    _ => VerdictKind::Crashed,
                };
                SolverVerdict { kind, raw, time }
            }
            Err(SessionError::Timeout) => SolverVerdict {
                kind: VerdictKind::Timeout,
                raw: String::new(),
                time,
            },
            Err(e) => SolverVerdict::crashed(e.to_string(), time),
        }
    }

    /// `(assert f)` followed by `(check-sat)`.
    pub fn assert_and_recheck(&mut self, formula: &str) -> SolverVerdict {
        if let Err(e) = self.send(&format!("(assert {formula})")) {
            return SolverVerdict::crashed(e.to_string(), Duration::ZERO);
        }
        self.check_sat()
    }

    pub fn push(&mut self) -> Result<(), SessionError> {
        self.send("(push 1)")
    }

    pub fn pop(&mut self) -> Result<(), SessionError> {
        self.send("(pop 1)")
    }

    /// `get-value` over SMT-LIB terms; replies are matched positionally.
    pub fn get_values(&mut self, terms: &[String]) -> Result<Vec<Sexp>, SessionError> {
        const CHUNK: usize = 64;
        let mut out = Vec::with_capacity(terms.len());
        for chunk in terms.chunks(CHUNK) {
            let start = Instant::now();
            self.send(&format!("(get-value ({}))", chunk.join(" ")))?;
            let reply = self.read_reply(start + self.config.timeout)?;
            if reply.is_error() {
                return Err(SessionError::Solver(reply.to_string()));
            }
            let pairs = reply.as_list().ok_or_else(|| ProtocolError(reply.to_string()))?;
            if pairs.len() != chunk.len() {
                return Err(ProtocolError(reply.to_string()).into());
            }
            for p in pairs {
                match p.as_list() {
                    Some([_, v]) => out.push(v.clone()),
                    _ => return Err(ProtocolError(p.to_string()).into()),
                }
            }
        }
        Ok(out)
    }

    fn kill(&mut self) {
        self.dead = true;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        if !self.dead {
            if let Some(mut stdin) = self.stdin.take() {
                let _ = stdin.write_all(b"(exit)\n");
            }
        }
        self.kill();
    }
}
