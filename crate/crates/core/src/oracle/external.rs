use super::{wire, OracleError};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

pub const TIMEOUT_ENV: &str = "TRFD_ORACLE_TIMEOUT_SECS";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

/// Per-call timeout: `TRFD_ORACLE_TIMEOUT_SECS` when set to a positive number, else 60 s.
pub fn timeout_from_env() -> Duration {
    std::env::var(TIMEOUT_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|s| s.is_finite() && *s > 0.0)
        .map(Duration::from_secs_f64)
        .unwrap_or(DEFAULT_TIMEOUT)
}

/// A child process speaking the wire protocol over stdin/stdout.
pub struct ExternalProcess {
    command: String,
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
    next_id: u64,
}

impl fmt::Debug for ExternalProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExternalProcess")
            .field("command", &self.command)
            .field("pid", &self.child.id())
            .field("timeout", &self.timeout)
            .finish()
    }
}

impl ExternalProcess {
    pub fn spawn(command: &str, n: usize, m: usize, timeout: Duration) -> Result<Self, OracleError> {
        let mut parts = command.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| OracleError::SpawnFailure("empty command".into()))?;
        let mut child = Command::new(program)
            .args(parts)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| OracleError::SpawnFailure(format!("`{command}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut process = ExternalProcess {
            command: command.to_string(),
            child,
            stdin,
            lines: rx,
            timeout,
            next_id: 1,
        };
        process.handshake(n, m)?;
        Ok(process)
    }

    fn handshake(&mut self, n: usize, m: usize) -> Result<(), OracleError> {
        self.send(&wire::hello(n, m))?;
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => wire::parse_ready(&line).map_err(OracleError::Failure),
            Ok(Err(e)) => Err(OracleError::Failure(format!("reading handshake: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(OracleError::HandshakeTimeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => Err(OracleError::Failure(
                "oracle exited before completing the handshake".into(),
            )),
        }
    }

    fn send(&mut self, line: &str) -> Result<(), OracleError> {
        writeln!(self.stdin, "{line}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| OracleError::Failure(format!("writing to oracle: {e}")))
    }

    pub fn query(&mut self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        let id = self.next_id;
        self.next_id += 1;
        self.send(&wire::request(id, x))?;
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => wire::parse_response(&line, id).map_err(OracleError::Failure),
            Ok(Err(e)) => Err(OracleError::Failure(format!("reading oracle output: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(OracleError::Failure(format!(
                "no reply to request {id} within {:?}",
                self.timeout
            ))),
            Err(RecvTimeoutError::Disconnected) => {
                Err(OracleError::Failure("oracle process exited".into()))
            }
        }
    }
}

impl Drop for ExternalProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
