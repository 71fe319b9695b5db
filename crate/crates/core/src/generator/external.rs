//! Host side of the external generator protocol.
//!
//! The child process reads one JSON request per line on stdin and answers
//! with one JSON document per line on stdout:
//!
//! ```text
//! {"op":"info"}                      -> {"latent_dim":L,"n_rows":R,"n_cols":C,"supports_discriminator":b,"name":s}
//! {"op":"generate","z":[L numbers]}  -> {"grid":[R*C numbers, row-major]}
//! {"op":"discriminate","grid":[..]}  -> {"score":x}   with 0 < x < 1
//! {"op":"shutdown"}                  -> (child exits 0)
//! ```
//!
//! An `{"error": "..."}` answer is surfaced as [`GeneratorError::Remote`].
//! Malformed answers, wrong grid sizes, out-of-range values and timeouts
//! fail the session: every later request returns [`GeneratorError::SessionFailed`].

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, ExitStatus, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::Deserialize;
use serde_json::{json, Value};

use super::{Discriminator, DiscriminatorKind, Generator, GeneratorError, GeneratorInfo, LatentVector};
use crate::grid::RealGrid;
use crate::scalar::Scalar;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

struct Session {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    failed: bool,
}

/// A generator (and optionally discriminator) served by a child process.
///
/// Requests are serialized; concurrent callers wait for the session lock.
pub struct ExternalGenerator {
    info: GeneratorInfo,
    session: Mutex<Session>,
    timeout: Duration,
    command: String,
}

#[derive(Deserialize)]
struct GridReply {
    grid: Vec<f64>,
}

#[derive(Deserialize)]
struct ScoreReply {
    score: f64,
}

impl ExternalGenerator {
    /// Starts `program args...` and performs the `info` handshake.
    pub fn spawn(program: &str, args: &[String], timeout: Duration) -> Result<Self, GeneratorError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| GeneratorError::Spawn(format!("{program}: {e}")))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().ok_or_else(|| GeneratorError::Spawn("no stdout pipe".into()))?;
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let session = Session { child, stdin, lines: rx, failed: false };
        let mut command = program.to_string();
        for a in args {
            command.push(' ');
            command.push_str(a);
        }
        let placeholder = GeneratorInfo {
            latent_dim: 0,
            n_rows: 0,
            n_cols: 0,
            supports_discriminator: false,
            name: String::new(),
        };
        let mut this = Self { info: placeholder, session: Mutex::new(session), timeout, command };
        this.info = this.handshake()?;
        Ok(this)
    }

    /// Splits `command_line` on whitespace into program and arguments.
    pub fn from_command_line(command_line: &str, timeout: Duration) -> Result<Self, GeneratorError> {
        let mut parts = command_line.split_whitespace().map(str::to_string);
        let program = parts.next().ok_or_else(|| GeneratorError::Spawn("empty command line".into()))?;
        let args: Vec<String> = parts.collect();
        Self::spawn(&program, &args, timeout)
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    /// Sends `info` and validates the declared dimensions.
    pub fn handshake(&self) -> Result<GeneratorInfo, GeneratorError> {
        let reply = self.request(&json!({"op": "info"}))?;
        let info: GeneratorInfo = self.decode(reply, "info")?;
        if info.latent_dim == 0 || info.n_rows == 0 || info.n_cols == 0 {
            return Err(self.violation(format!(
                "declared dimensions must be positive (latent_dim {}, {}x{})",
                info.latent_dim, info.n_rows, info.n_cols
            )));
        }
        Ok(info)
    }

    pub fn generate_grid<T: Scalar>(&self, z: &LatentVector<T>) -> Result<RealGrid<T>, GeneratorError> {
        self.info.check_latent(z)?;
        let zs: Vec<f64> = z.values().iter().map(|v| v.as_f64()).collect();
        let reply: GridReply = {
            let v = self.request(&json!({"op": "generate", "z": zs}))?;
            self.decode(v, "generate")?
        };
        let shape = self.info.shape();
        if reply.grid.len() != shape.len() {
            return Err(self.violation(format!("grid has {} values, expected {}", reply.grid.len(), shape.len())));
        }
        if let Some(bad) = reply.grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(self.violation(format!("grid value {bad} outside [0, 1]")));
        }
        Ok(RealGrid::new(shape, reply.grid.into_iter().map(T::lit).collect())?)
    }

    pub fn discriminate<T: Scalar>(&self, grid: &RealGrid<T>) -> Result<T, GeneratorError> {
        if !self.info.supports_discriminator {
            return Err(GeneratorError::NoDiscriminator);
        }
        if grid.shape() != self.info.shape() {
            return Err(GeneratorError::ShapeMismatch { expected: self.info.shape(), found: grid.shape() });
        }
        let cells: Vec<f64> = grid.cells().iter().map(|v| v.as_f64()).collect();
        let v = self.request(&json!({"op": "discriminate", "grid": cells}))?;
        let reply: ScoreReply = self.decode(v, "discriminate")?;
        if !(reply.score > 0.0 && reply.score < 1.0) {
            return Err(self.violation(format!("score {} outside (0, 1)", reply.score)));
        }
        Ok(T::lit(reply.score))
    }

    /// Asks the child to exit and waits for it.
    pub fn shutdown(self) -> Result<ExitStatus, GeneratorError> {
        let mut s = self.session.into_inner().unwrap_or_else(|p| p.into_inner());
        if let Some(mut stdin) = s.stdin.take() {
            let _ = writeln!(stdin, "{}", json!({"op": "shutdown"}));
            let _ = stdin.flush();
        }
        wait_with_timeout(&mut s.child, self.timeout)
    }

    fn request(&self, req: &Value) -> Result<Value, GeneratorError> {
        let mut s = self.session.lock().unwrap_or_else(|p| p.into_inner());
        if s.failed {
            return Err(GeneratorError::SessionFailed);
        }
        let result = exchange(&mut s, req, self.timeout);
        if let Err(e) = &result {
            if !matches!(e, GeneratorError::Remote(_)) {
                s.failed = true;
                if matches!(e, GeneratorError::Timeout(_)) {
                    let _ = s.child.kill();
                }
            }
        }
        result
    }

    fn decode<R: for<'de> Deserialize<'de>>(&self, v: Value, op: &str) -> Result<R, GeneratorError> {
        serde_json::from_value(v).map_err(|e| self.violation(format!("malformed {op} reply: {e}")))
    }

    fn violation(&self, msg: String) -> GeneratorError {
        let mut s = self.session.lock().unwrap_or_else(|p| p.into_inner());
        s.failed = true;
        GeneratorError::Protocol(msg)
    }
}

fn exchange(s: &mut Session, req: &Value, timeout: Duration) -> Result<Value, GeneratorError> {
    let stdin = s.stdin.as_mut().ok_or(GeneratorError::SessionFailed)?;
    writeln!(stdin, "{req}")
        .and_then(|_| stdin.flush())
        .map_err(|e| GeneratorError::Protocol(format!("cannot write request: {e}")))?;
    let line = match s.lines.recv_timeout(timeout) {
        Ok(Ok(line)) => line,
        Ok(Err(e)) => return Err(GeneratorError::Protocol(format!("cannot read reply: {e}"))),
        Err(RecvTimeoutError::Timeout) => return Err(GeneratorError::Timeout(timeout)),
        Err(RecvTimeoutError::Disconnected) => {
            return Err(GeneratorError::Protocol("generator closed its output".into()))
        }
    };
    let value: Value = serde_json::from_str(&line)
        .map_err(|e| GeneratorError::Protocol(format!("reply is not JSON ({e}): {:.120}", line)))?;
    if !value.is_object() {
        return Err(GeneratorError::Protocol(format!("reply is not a JSON object: {:.120}", line)));
    }
    if let Some(msg) = value.get("error") {
        return Err(GeneratorError::Remote(msg.as_str().map_or_else(|| msg.to_string(), str::to_string)));
    }
    Ok(value)
}

fn wait_with_timeout(child: &mut Child, timeout: Duration) -> Result<ExitStatus, GeneratorError> {
    let deadline = Instant::now() + timeout;
    loop {
        match child.try_wait() {
            Ok(Some(status)) => return Ok(status),
            Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(5)),
            Ok(None) => {
                let _ = child.kill();
                return Err(GeneratorError::Timeout(timeout));
            }
            Err(e) => return Err(GeneratorError::Protocol(format!("cannot wait for generator: {e}"))),
        }
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        if let Some(mut stdin) = self.stdin.take() {
            let _ = writeln!(stdin, "{}", json!({"op": "shutdown"}));
        }
        if wait_with_timeout(&mut self.child, Duration::from_secs(1)).is_err() {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}

impl<T: Scalar> Generator<T> for ExternalGenerator {
    fn info(&self) -> &GeneratorInfo {
        &self.info
    }

    fn generate(&self, z: &LatentVector<T>) -> Result<RealGrid<T>, GeneratorError> {
        self.generate_grid(z)
    }
}

impl<T: Scalar> Discriminator<T> for ExternalGenerator {
    fn kind(&self) -> DiscriminatorKind {
        DiscriminatorKind::External
    }

    fn score(&self, grid: &RealGrid<T>) -> Result<T, GeneratorError> {
        self.discriminate(grid)
    }
}
