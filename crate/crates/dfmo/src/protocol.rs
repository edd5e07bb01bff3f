//! Line protocol for external black-box objectives.
//!
//! One evaluation is one round trip: the client sends a single line holding
//! the `n` decision coordinates as 17-significant-digit decimals ('.' radix,
//! space separated, newline terminated) and the server replies with one line
//! of `q` objective values in the same format, or `ERR <message>`. A single
//! request is in flight at a time.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{Receiver, RecvTimeoutError};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::types::{DecisionPoint, ObjectiveVector};

/// Environment variable holding the default reply timeout in milliseconds.
pub const TIMEOUT_ENV: &str = "DFMO_EXTERNAL_TIMEOUT_MS";

const DEFAULT_TIMEOUT_MS: u64 = 10_000;

/// Reply deadline for external objectives, from `DFMO_EXTERNAL_TIMEOUT_MS`
/// when set.
pub fn default_timeout() -> Duration {
    let millis = std::env::var(TIMEOUT_ENV)
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .unwrap_or(DEFAULT_TIMEOUT_MS);
    Duration::from_millis(millis)
}

/// Renders one float with 17 significant digits, enough to round-trip f64
/// exactly through the text protocol.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// One protocol line for a vector of floats.
pub fn format_floats(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format_float(*v)).collect();
    parts.join(" ")
}

/// Parses a protocol line into exactly `expected` floats.
pub fn parse_floats(line: &str, expected: usize) -> Result<Vec<f64>> {
    let values: Vec<f64> = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::Protocol(format!("unparseable float {tok:?} in {line:?}")))
        })
        .collect::<Result<_>>()?;
    if values.len() != expected {
        return Err(Error::Protocol(format!(
            "expected {expected} values, got {} in {line:?}",
            values.len()
        )));
    }
    Ok(values)
}

/// Client side of the protocol: a child process evaluated over stdin/stdout.
pub struct ExternalClient {
    child: Child,
    stdin: ChildStdin,
    replies: Receiver<std::io::Result<String>>,
    timeout: Duration,
    command: String,
}

impl ExternalClient {
    /// Spawns `command` (split on whitespace, no shell) with piped stdio.
    pub fn spawn(command: &str, timeout: Duration) -> Result<Self> {
        let mut parts = command.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| Error::Config("empty external command".into()))?;
        let mut child = Command::new(program)
            .args(parts)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Config(format!("cannot spawn {command:?}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, replies) = std::sync::mpsc::channel();
        std::thread::spawn(move || {
            let reader = BufReader::new(stdout);
            for line in reader.lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            child,
            stdin,
            replies,
            timeout,
            command: command.to_string(),
        })
    }

    /// One request/reply round trip.
    pub fn eval(&mut self, x: &[f64], q: usize) -> Result<Vec<f64>> {
        let line = format_floats(x);
        writeln!(self.stdin, "{line}").map_err(|e| {
            Error::Protocol(format!("write to {:?} failed: {e}", self.command))
        })?;
        self.stdin
            .flush()
            .map_err(|e| Error::Protocol(format!("flush to {:?} failed: {e}", self.command)))?;
        let reply = match self.replies.recv_timeout(self.timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => {
                return Err(Error::Protocol(format!(
                    "read from {:?} failed: {e}",
                    self.command
                )))
            }
            Err(RecvTimeoutError::Timeout) => {
                return Err(Error::Timeout {
                    millis: self.timeout.as_millis() as u64,
                })
            }
            Err(RecvTimeoutError::Disconnected) => {
                return Err(Error::Protocol(format!(
                    "{:?} closed its output stream",
                    self.command
                )))
            }
        };
        if let Some(msg) = reply.strip_prefix("ERR") {
            return Err(Error::Oracle {
                point: x.to_vec(),
                reason: format!("server error reply: {}", msg.trim()),
            });
        }
        let values = parse_floats(&reply, q)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Oracle {
                point: x.to_vec(),
                reason: format!("non-finite reply {reply:?}"),
            });
        }
        Ok(values)
    }
}

impl Drop for ExternalClient {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Server side: answers protocol requests with evaluations of `oracle` until
/// the input stream ends. Parse and evaluation failures become `ERR` replies;
/// the loop keeps serving.
pub fn serve(
    oracle: &mut dyn Objective,
    input: impl BufRead,
    mut output: impl Write,
) -> Result<()> {
    let n = oracle.n();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = parse_floats(&line, n)
            .and_then(DecisionPoint::new)
            .and_then(|x| oracle.eval(&x))
            .map(|f| format_floats(f.values()));
        match reply {
            Ok(text) => writeln!(output, "{text}")?,
            Err(e) => writeln!(output, "ERR {e}")?,
        }
        output.flush()?;
    }
    Ok(())
}

/// An [`Objective`] backed by an [`ExternalClient`].
pub struct ExternalObjective {
    client: ExternalClient,
    n: usize,
    q: usize,
}

impl ExternalObjective {
    pub fn new(client: ExternalClient, n: usize, q: usize) -> Self {
        Self { client, n, q }
    }
}

impl Objective for ExternalObjective {
    fn n(&self) -> usize {
        self.n
    }

    fn q(&self) -> usize {
        self.q
    }

    fn eval(&mut self, x: &DecisionPoint) -> Result<ObjectiveVector> {
        let values = self.client.eval(x.coords(), self.q)?;
        ObjectiveVector::new(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_lines_round_trip_exactly() {
        let values = [
            1.0,
            -4.2e-3,
            std::f64::consts::PI,
            6.25 / 18.0,
            f64::MIN_POSITIVE,
            -0.0,
            1.7976931348623157e308,
        ];
        let line = format_floats(&values);
        let parsed = parse_floats(&line, values.len()).unwrap();
        for (a, b) in values.iter().zip(&parsed) {
            assert_eq!(a.to_bits(), b.to_bits(), "{a} failed to round-trip");
        }
    }

    #[test]
    fn parse_rejects_wrong_arity_and_garbage() {
        assert!(matches!(
            parse_floats("1.0 2.0", 3),
            Err(Error::Protocol(_))
        ));
        assert!(matches!(
            parse_floats("1.0 spam", 2),
            Err(Error::Protocol(_))
        ));
    }

    #[test]
    fn serve_answers_and_reports_errors() {
        struct Echo;
        impl Objective for Echo {
            fn n(&self) -> usize {
                2
            }
            fn q(&self) -> usize {
                2
            }
            fn eval(&mut self, x: &DecisionPoint) -> Result<ObjectiveVector> {
                ObjectiveVector::new(x.coords().to_vec())
            }
        }
        let input = b"1.0 2.0\nbad line\n3.0 4.0\n" as &[u8];
        let mut output = Vec::new();
        serve(&mut Echo, input, &mut output).unwrap();
        let text = String::from_utf8(output).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(parse_floats(lines[0], 2).unwrap(), vec![1.0, 2.0]);
        assert!(lines[1].starts_with("ERR "));
        assert_eq!(parse_floats(lines[2], 2).unwrap(), vec![3.0, 4.0]);
    }
}
