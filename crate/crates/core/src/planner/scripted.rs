use std::collections::VecDeque;

use super::parse::format_response;
use super::types::{Latency, PlannerError, PlannerQuery, PlannerResponse, Reply};
use super::Planner;

/// Replays a fixed list of answers, one per query.
#[derive(Debug, Clone, Default)]
pub struct ScriptedPlanner {
    script: VecDeque<String>,
    /// Keep answering with the last entry instead of failing once the script runs out.
    pub repeat_last: bool,
    pub latency_ticks: u64,
    last: Option<String>,
}

impl ScriptedPlanner {
    pub fn new(responses: impl IntoIterator<Item = PlannerResponse>, latency_ticks: u64) -> Self {
        Self::from_texts(responses.into_iter().map(|r| format_response(&r)), latency_ticks)
    }

    /// Raw texts, passed through unparsed.
    pub fn from_texts(texts: impl IntoIterator<Item = String>, latency_ticks: u64) -> Self {
        Self { script: texts.into_iter().collect(), repeat_last: false, latency_ticks, last: None }
    }

    pub fn repeating(response: PlannerResponse, latency_ticks: u64) -> Self {
        let mut s = Self::new([response], latency_ticks);
        s.repeat_last = true;
        s
    }

    pub fn remaining(&self) -> usize {
        self.script.len()
    }

    /// Next scripted text.
    pub fn next_text(&mut self) -> Result<String, PlannerError> {
        match self.script.pop_front() {
            Some(t) => {
                self.last = Some(t.clone());
                Ok(t)
            }
            None if self.repeat_last => self.last.clone().ok_or(PlannerError::Exhausted),
            None => Err(PlannerError::Exhausted),
        }
    }
}

impl Planner for ScriptedPlanner {
    fn name(&self) -> &'static str {
        "scripted"
    }

    fn respond(&mut self, _q: &PlannerQuery, _prompt: &str) -> Result<Reply, PlannerError> {
        Ok(Reply { text: self.next_text()?, latency: Latency::Ticks(self.latency_ticks) })
    }

    fn simulated_latency_ticks(&self) -> Option<u64> {
        Some(self.latency_ticks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::parse_response;

    #[test]
    fn pops_in_order_then_fails() {
        let mut s = ScriptedPlanner::new([PlannerResponse::centroid(2, ""), PlannerResponse::centroid(0, "")], 0);
        assert_eq!(parse_response(&s.next_text().unwrap()).unwrap().index, Some(2));
        assert_eq!(parse_response(&s.next_text().unwrap()).unwrap().index, Some(0));
        assert_eq!(s.next_text(), Err(PlannerError::Exhausted));
    }

    #[test]
    fn repeating_never_runs_out() {
        let mut s = ScriptedPlanner::repeating(PlannerResponse::none(""), 0);
        for _ in 0..5 {
            assert!(s.next_text().is_ok());
        }
    }
}
