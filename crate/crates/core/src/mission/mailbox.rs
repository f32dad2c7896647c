//! Single-slot planner mailbox, inline or backed by a planner thread.

use std::sync::mpsc::{self, Receiver, Sender, TryRecvError};
use std::thread::JoinHandle;

use super::config::ExecutionMode;
use crate::planner::{Latency, Planner, PlannerError, PlannerQuery, Reply};

type Answer = Result<Reply, PlannerError>;

/// An answer handed back to the mission loop.
#[derive(Debug, Clone)]
pub struct Delivery {
    pub answer: Answer,
    pub submitted: u64,
    pub delivered: u64,
}

enum Backend {
    Inline(Box<dyn Planner>),
    Threaded { jobs: Option<Sender<(PlannerQuery, String)>>, answers: Receiver<Answer>, worker: Option<JoinHandle<()>> },
}

struct InFlight {
    submitted: u64,
    due: Option<u64>,
    answer: Option<Answer>,
}

/// Holds at most one outstanding query. Simulated latency is counted in ticks, so both
/// backends deliver on the same tick; wall-clock answers arrive when they arrive.
pub struct Mailbox {
    backend: Backend,
    name: &'static str,
    simulated: Option<u64>,
    dt: f64,
    slot: Option<InFlight>,
}

impl Mailbox {
    pub fn new(planner: Box<dyn Planner>, mode: ExecutionMode, dt: f64) -> Self {
        let name = planner.name();
        let simulated = planner.simulated_latency_ticks();
        let backend = match mode {
            ExecutionMode::Inline => Backend::Inline(planner),
            ExecutionMode::Threaded => {
                let (job_tx, job_rx) = mpsc::channel::<(PlannerQuery, String)>();
                let (ans_tx, ans_rx) = mpsc::channel();
                let mut planner = planner;
                let worker = std::thread::Builder::new()
                    .name("planner".into())
                    .spawn(move || {
                        for (q, prompt) in job_rx {
                            if ans_tx.send(planner.respond(&q, &prompt)).is_err() {
                                break;
                            }
                        }
                    })
                    .expect("spawn planner thread");
                Backend::Threaded { jobs: Some(job_tx), answers: ans_rx, worker: Some(worker) }
            }
        };
        Self { backend, name, simulated, dt, slot: None }
    }

    pub fn planner_name(&self) -> &'static str {
        self.name
    }

    pub fn busy(&self) -> bool {
        self.slot.is_some()
    }

    /// Posts a query. The slot must be empty.
    pub fn submit(&mut self, tick: u64, query: PlannerQuery, prompt: String) {
        assert!(self.slot.is_none(), "planner mailbox already holds a query");
        let slot = match &mut self.backend {
            Backend::Inline(p) => {
                let answer = p.respond(&query, &prompt);
                let lag = match (&answer, self.simulated) {
                    (_, Some(n)) => n,
                    (Ok(Reply { latency: Latency::Wall(s), .. }), None) => (s / self.dt).ceil() as u64,
                    (Ok(Reply { latency: Latency::Ticks(n), .. }), None) => *n,
                    (Err(_), None) => 0,
                };
                InFlight { submitted: tick, due: Some(tick + lag), answer: Some(answer) }
            }
            Backend::Threaded { jobs, .. } => {
                let sent = jobs.as_ref().is_some_and(|j| j.send((query, prompt)).is_ok());
                if sent {
                    InFlight { submitted: tick, due: self.simulated.map(|n| tick + n), answer: None }
                } else {
                    InFlight { submitted: tick, due: Some(tick), answer: Some(Err(PlannerError::Transport("planner thread is gone".into()))) }
                }
            }
        };
        self.slot = Some(slot);
    }

    /// Returns the answer if it is due at `tick`.
    pub fn poll(&mut self, tick: u64) -> Option<Delivery> {
        let slot = self.slot.as_mut()?;
        if slot.due.is_some_and(|d| tick < d) {
            return None;
        }
        let answer = match slot.answer.take() {
            Some(a) => a,
            None => {
                let Backend::Threaded { answers, .. } = &self.backend else { unreachable!("inline answers are stored at submit") };
                if slot.due.is_some() {
                    answers.recv().unwrap_or_else(|_| Err(PlannerError::Transport("planner thread is gone".into())))
                } else {
                    match answers.try_recv() {
                        Ok(a) => a,
                        Err(TryRecvError::Empty) => return None,
                        Err(TryRecvError::Disconnected) => Err(PlannerError::Transport("planner thread is gone".into())),
                    }
                }
            }
        };
        let submitted = slot.submitted;
        self.slot = None;
        Some(Delivery { answer, submitted, delivered: tick })
    }
}

impl Drop for Mailbox {
    fn drop(&mut self) {
        if let Backend::Threaded { jobs, worker, .. } = &mut self.backend {
            jobs.take();
            // an answer still in flight from a remote endpoint is abandoned
            if let Some(w) = worker.take() {
                if self.slot.is_none() || self.simulated.is_some() {
                    let _ = w.join();
                }
            }
        }
    }
}
