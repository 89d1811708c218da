//! Text-completion adapter.
//!
//! One request is one JSON object on a single line; one response is one JSON
//! object. Over TCP the client writes the request line, half-closes, and
//! reads until EOF. Over a process pipe the request goes to the child's stdin
//! and the response is read from its stdout.
//!
//! Request:
//! `{"schema":"floorwalk.completion/1","prompt":"...","max_new_tokens":160,"temperature":0.0,"top_p":1.0,"top_k":null}`
//!
//! Response: `{"text":"1. Start by walking ..."}`. Anything without a string
//! `text` field is a malformed response.

use std::io::{ErrorKind, Read, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub const COMPLETION_SCHEMA: &str = "floorwalk.completion/1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LmError {
    #[error("completion endpoint timed out after {0:?}")]
    Timeout(Duration),
    #[error("completion endpoint unavailable: {0}")]
    EndpointUnavailable(String),
    #[error("malformed completion response: {0}")]
    MalformedResponse(String),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LmEndpoint {
    /// `host:port` of a line-JSON completion server.
    Tcp { addr: String },
    /// Child process speaking the same protocol over stdin/stdout.
    Process { program: String, args: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LmConfig {
    pub endpoint: LmEndpoint,
    /// `None` sizes the budget from the command count.
    pub max_new_tokens: Option<u32>,
    pub temperature: f32,
    /// Nucleus filter; 1.0 disables it.
    pub top_p: f32,
    pub top_k: Option<u32>,
    pub timeout: Duration,
}

impl LmConfig {
    /// Greedy decoding with a 30 s timeout.
    pub fn new(endpoint: LmEndpoint) -> Self {
        Self {
            endpoint,
            max_new_tokens: None,
            temperature: 0.0,
            top_p: 1.0,
            top_k: None,
            timeout: Duration::from_secs(30),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn validate(&self) -> Result<(), LmError> {
        if self.timeout.is_zero() {
            return Err(LmError::InvalidConfig("timeout must be positive".into()));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(LmError::InvalidConfig(format!(
                "temperature {} is not a non-negative number",
                self.temperature
            )));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(LmError::InvalidConfig(format!(
                "top_p {} outside (0, 1]",
                self.top_p
            )));
        }
        if self.max_new_tokens == Some(0) {
            return Err(LmError::InvalidConfig(
                "max_new_tokens must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Token budget for a script of `commands` lines.
    pub fn token_budget(&self, commands: usize) -> u32 {
        self.max_new_tokens.unwrap_or(32 + 48 * commands as u32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub schema: String,
    pub prompt: String,
    pub max_new_tokens: u32,
    pub temperature: f32,
    pub top_p: f32,
    pub top_k: Option<u32>,
}

#[derive(Deserialize)]
struct CompletionResponse {
    text: String,
}

/// Anything that turns a completion request into text.
pub trait CompletionBackend {
    fn complete(&self, request: &CompletionRequest, timeout: Duration) -> Result<String, LmError>;
}

impl CompletionBackend for LmEndpoint {
    fn complete(&self, request: &CompletionRequest, timeout: Duration) -> Result<String, LmError> {
        let line = serde_json::to_string(request).expect("request serializes");
        let raw = match self {
            LmEndpoint::Tcp { addr } => tcp_round_trip(addr, &line, timeout)?,
            LmEndpoint::Process { program, args } => {
                process_round_trip(program, args, &line, timeout)?
            }
        };
        parse_response(&raw)
    }
}

fn parse_response(raw: &[u8]) -> Result<String, LmError> {
    let text = std::str::from_utf8(raw).map_err(|e| LmError::MalformedResponse(e.to_string()))?;
    let resp: CompletionResponse =
        serde_json::from_str(text.trim()).map_err(|e| LmError::MalformedResponse(e.to_string()))?;
    Ok(resp.text)
}

fn io_to_lm(e: std::io::Error, timeout: Duration) -> LmError {
    match e.kind() {
        ErrorKind::TimedOut | ErrorKind::WouldBlock => LmError::Timeout(timeout),
        _ => LmError::EndpointUnavailable(e.to_string()),
    }
}

fn tcp_round_trip(addr: &str, line: &str, timeout: Duration) -> Result<Vec<u8>, LmError> {
    let sock = addr
        .to_socket_addrs()
        .map_err(|e| LmError::EndpointUnavailable(format!("{addr}: {e}")))?
        .next()
        .ok_or_else(|| LmError::EndpointUnavailable(format!("{addr}: no address")))?;
    let mut stream =
        TcpStream::connect_timeout(&sock, timeout).map_err(|e| io_to_lm(e, timeout))?;
    stream
        .set_read_timeout(Some(timeout))
        .map_err(|e| io_to_lm(e, timeout))?;
    stream
        .set_write_timeout(Some(timeout))
        .map_err(|e| io_to_lm(e, timeout))?;
    stream
        .write_all(line.as_bytes())
        .map_err(|e| io_to_lm(e, timeout))?;
    stream.write_all(b"\n").map_err(|e| io_to_lm(e, timeout))?;
    stream
        .shutdown(std::net::Shutdown::Write)
        .map_err(|e| io_to_lm(e, timeout))?;
    let mut buf = Vec::new();
    stream
        .read_to_end(&mut buf)
        .map_err(|e| io_to_lm(e, timeout))?;
    Ok(buf)
}

fn process_round_trip(
    program: &str,
    args: &[String],
    line: &str,
    timeout: Duration,
) -> Result<Vec<u8>, LmError> {
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| LmError::EndpointUnavailable(format!("{program}: {e}")))?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let mut stdout = child.stdout.take().expect("piped stdout");
    let payload = format!("{line}\n");
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        // A child that ignores stdin may close it early; its stdout decides.
        let _ = stdin.write_all(payload.as_bytes());
        drop(stdin);
        let mut buf = Vec::new();
        let res = stdout.read_to_end(&mut buf).map(|_| buf);
        let _ = tx.send(res);
    });
    match rx.recv_timeout(timeout) {
        Ok(Ok(buf)) => {
            let status = child
                .wait()
                .map_err(|e| LmError::EndpointUnavailable(e.to_string()))?;
            if !status.success() {
                return Err(LmError::EndpointUnavailable(format!(
                    "{program} exited with {status}"
                )));
            }
            Ok(buf)
        }
        Ok(Err(e)) => {
            let _ = child.kill();
            let _ = child.wait();
            Err(LmError::EndpointUnavailable(e.to_string()))
        }
        Err(_) => {
            let _ = child.kill();
            let _ = child.wait();
            Err(LmError::Timeout(timeout))
        }
    }
}

/// Sends one completion request to the configured endpoint. No retries.
pub fn invoke_lm(prompt: &str, config: &LmConfig, commands: usize) -> Result<String, LmError> {
    invoke_with(&config.endpoint, prompt, config, commands)
}

pub fn invoke_with(
    backend: &dyn CompletionBackend,
    prompt: &str,
    config: &LmConfig,
    commands: usize,
) -> Result<String, LmError> {
    config.validate()?;
    let request = CompletionRequest {
        schema: COMPLETION_SCHEMA.to_owned(),
        prompt: prompt.to_owned(),
        max_new_tokens: config.token_budget(commands),
        temperature: config.temperature,
        top_p: config.top_p,
        top_k: config.top_k,
    };
    backend.complete(&request, config.timeout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::net::TcpListener;

    fn serve_once(reply: &'static str) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap().to_string();
        std::thread::spawn(move || {
            let (mut s, _) = listener.accept().unwrap();
            let mut req = Vec::new();
            s.read_to_end(&mut req).unwrap();
            let parsed: CompletionRequest = serde_json::from_slice(&req).unwrap();
            assert_eq!(parsed.schema, COMPLETION_SCHEMA);
            s.write_all(reply.as_bytes()).unwrap();
        });
        addr
    }

    fn cfg(addr: String) -> LmConfig {
        LmConfig::new(LmEndpoint::Tcp { addr }).with_timeout(Duration::from_secs(5))
    }

    #[test]
    fn echoes_canned_guide() {
        let addr = serve_once("{\"text\":\"1. Start by walking north for 1 step, and you will reach your destination.\"}\n");
        let text = invoke_lm("prompt", &cfg(addr), 1).unwrap();
        assert!(text.starts_with("1. Start by walking north"));
    }

    #[test]
    fn missing_text_field_is_malformed() {
        let addr = serve_once("{\"completion\":\"hi\"}");
        assert!(matches!(
            invoke_lm("p", &cfg(addr), 1),
            Err(LmError::MalformedResponse(_))
        ));
    }

    #[test]
    fn unreachable_endpoint() {
        // Bind then drop to get a port with nothing listening.
        let addr = TcpListener::bind("127.0.0.1:0")
            .unwrap()
            .local_addr()
            .unwrap()
            .to_string();
        let t0 = std::time::Instant::now();
        let err = invoke_lm("p", &cfg(addr), 1).unwrap_err();
        assert!(matches!(
            err,
            LmError::EndpointUnavailable(_) | LmError::Timeout(_)
        ));
        assert!(t0.elapsed() < Duration::from_secs(6));
    }

    #[test]
    fn silent_server_times_out() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap().to_string();
        let hold = std::thread::spawn(move || {
            let (s, _) = listener.accept().unwrap();
            std::thread::sleep(Duration::from_millis(600));
            drop(s);
        });
        let c = cfg(addr).with_timeout(Duration::from_millis(150));
        assert_eq!(
            invoke_lm("p", &c, 1),
            Err(LmError::Timeout(Duration::from_millis(150)))
        );
        hold.join().unwrap();
    }

    #[test]
    fn process_endpoint() {
        let ep = LmEndpoint::Process {
            program: "sh".into(),
            args: vec![
                "-c".into(),
                "cat >/dev/null; printf '{\"text\":\"ok\"}'".into(),
            ],
        };
        let c = LmConfig::new(ep).with_timeout(Duration::from_secs(5));
        assert_eq!(invoke_lm("p", &c, 1).unwrap(), "ok");

        let slow = LmEndpoint::Process {
            program: "sleep".into(),
            args: vec!["5".into()],
        };
        let c = LmConfig::new(slow).with_timeout(Duration::from_millis(100));
        assert!(matches!(invoke_lm("p", &c, 1), Err(LmError::Timeout(_))));

        let missing = LmEndpoint::Process {
            program: "/nonexistent/model".into(),
            args: vec![],
        };
        assert!(matches!(
            invoke_lm("p", &LmConfig::new(missing), 1),
            Err(LmError::EndpointUnavailable(_))
        ));
    }

    #[test]
    fn config_validation() {
        let ep = LmEndpoint::Tcp {
            addr: "127.0.0.1:1".into(),
        };
        assert!(LmConfig::new(ep.clone())
            .with_timeout(Duration::ZERO)
            .validate()
            .is_err());
        let mut c = LmConfig::new(ep);
        assert_eq!(c.token_budget(3), 176);
        c.top_p = 0.0;
        assert!(c.validate().is_err());
    }
}
