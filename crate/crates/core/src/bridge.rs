//! An external process acting as a search policy, spoken to with one JSON
//! record per line over its standard streams.
//!
//! Requests are `{"id": 7, "src": "<current> Y <target>", "beam": 5}` and
//! responses `{"id": 7, "proposals": [{"rule": "stm1 Commute N", "score": -0.1}]}`.
//! Responses are matched to requests by id and may arrive in any order.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::lang::{print_pair, Program};
use crate::rewrite::RewriteRule;
use crate::search::{Policy, PolicyError, PolicyProposal};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyRequest {
    pub id: u64,
    pub src: String,
    pub beam: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireProposal {
    pub rule: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyResponse {
    pub id: u64,
    pub proposals: Vec<WireProposal>,
}

type Pending = Arc<Mutex<Option<HashMap<u64, Sender<PolicyResponse>>>>>;

/// A running policy process. Requests from several threads are multiplexed
/// over one connection.
pub struct ExternalPolicy {
    child: Mutex<Child>,
    stdin: Mutex<ChildStdin>,
    /// `None` once the process's output has closed.
    pending: Pending,
    next_id: AtomicU64,
    timeout: Duration,
}

impl std::fmt::Debug for ExternalPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalPolicy").field("timeout", &self.timeout).finish_non_exhaustive()
    }
}

impl ExternalPolicy {
    /// Runs `command` through `sh -c`.
    pub fn spawn(command: &str) -> Result<ExternalPolicy, PolicyError> {
        let mut cmd = Command::new("sh");
        cmd.arg("-c").arg(command);
        ExternalPolicy::spawn_command(cmd)
    }

    pub fn spawn_command(mut cmd: Command) -> Result<ExternalPolicy, PolicyError> {
        let mut child = cmd
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| PolicyError::Transport(format!("cannot start policy: {e}")))?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let pending: Pending = Arc::new(Mutex::new(Some(HashMap::new())));
        let reader_pending = Arc::clone(&pending);
        thread::Builder::new()
            .name("policy-reader".into())
            .spawn(move || {
                for line in BufReader::new(stdout).lines() {
                    let Ok(line) = line else { break };
                    if line.trim().is_empty() {
                        continue;
                    }
                    let resp: PolicyResponse = match serde_json::from_str(&line) {
                        Ok(r) => r,
                        Err(e) => {
                            log::warn!("ignoring malformed policy record: {e}");
                            continue;
                        }
                    };
                    let waiter = reader_pending.lock().unwrap().as_mut().and_then(|m| m.remove(&resp.id));
                    match waiter {
                        Some(tx) => {
                            let _ = tx.send(resp);
                        }
                        None => log::warn!("policy answered unknown request {}", resp.id),
                    }
                }
                reader_pending.lock().unwrap().take();
            })
            .map_err(|e| PolicyError::Transport(e.to_string()))?;
        Ok(ExternalPolicy {
            child: Mutex::new(child),
            stdin: Mutex::new(stdin),
            pending,
            next_id: AtomicU64::new(1),
            timeout: DEFAULT_TIMEOUT,
        })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> ExternalPolicy {
        self.timeout = timeout;
        self
    }

    fn send(&self, src: String, beam: usize) -> Result<(u64, Receiver<PolicyResponse>), PolicyError> {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let (tx, rx) = mpsc::channel();
        match self.pending.lock().unwrap().as_mut() {
            Some(m) => m.insert(id, tx),
            None => return Err(PolicyError::Transport("policy process has exited".into())),
        };
        let mut line = serde_json::to_string(&PolicyRequest { id, src, beam }).expect("request serializes");
        line.push('\n');
        let mut stdin = self.stdin.lock().unwrap();
        if let Err(e) = stdin.write_all(line.as_bytes()).and_then(|_| stdin.flush()) {
            self.forget(id);
            return Err(PolicyError::Transport(format!("cannot write to policy: {e}")));
        }
        Ok((id, rx))
    }

    fn forget(&self, id: u64) {
        if let Some(m) = self.pending.lock().unwrap().as_mut() {
            m.remove(&id);
        }
    }

    fn receive(
        &self,
        id: u64,
        rx: Receiver<PolicyResponse>,
        deadline: Instant,
        beam: usize,
    ) -> Result<Vec<PolicyProposal>, PolicyError> {
        let wait = deadline.saturating_duration_since(Instant::now());
        match rx.recv_timeout(wait) {
            Ok(resp) => Ok(decode(resp, beam)),
            Err(RecvTimeoutError::Timeout) => {
                self.forget(id);
                Err(PolicyError::Timeout(self.timeout))
            }
            Err(RecvTimeoutError::Disconnected) => {
                Err(PolicyError::Transport("policy process closed its output".into()))
            }
        }
    }

    /// Sends one raw request and waits for its answer.
    pub fn request(&self, src: &str, beam: usize) -> Result<Vec<PolicyProposal>, PolicyError> {
        let deadline = Instant::now() + self.timeout;
        let (id, rx) = self.send(src.to_string(), beam)?;
        self.receive(id, rx, deadline, beam)
    }
}

/// Parses proposal rules, dropping the unparseable ones, and returns at most
/// `beam` of them best first.
fn decode(resp: PolicyResponse, beam: usize) -> Vec<PolicyProposal> {
    let mut out: Vec<PolicyProposal> = resp
        .proposals
        .into_iter()
        .filter_map(|p| match p.rule.parse::<RewriteRule>() {
            Ok(rule) => Some(PolicyProposal { rule, score: p.score }),
            Err(e) => {
                log::warn!("dropping unparseable proposal `{}`: {e}", p.rule);
                None
            }
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score));
    out.truncate(beam);
    out
}

impl Policy for ExternalPolicy {
    fn propose(&self, current: &Program, target: &Program, beam: usize) -> Result<Vec<PolicyProposal>, PolicyError> {
        self.request(&print_pair(current, target), beam)
    }

    fn propose_batch(
        &self,
        queries: &[(&Program, &Program)],
        beam: usize,
    ) -> Result<Vec<Vec<PolicyProposal>>, PolicyError> {
        let deadline = Instant::now() + self.timeout;
        let mut sent = Vec::with_capacity(queries.len());
        for (c, t) in queries {
            sent.push(self.send(print_pair(c, t), beam)?);
        }
        sent.into_iter().map(|(id, rx)| self.receive(id, rx, deadline, beam)).collect()
    }
}

impl Drop for ExternalPolicy {
    fn drop(&mut self) {
        let mut child = self.child.lock().unwrap();
        let _ = child.kill();
        let _ = child.wait();
    }
}
