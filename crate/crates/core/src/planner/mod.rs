//! High-level waypoint planners and their text protocol.

mod mode;
mod parse;
mod prompt;
mod remote;
mod resolve;
mod rule;
mod scripted;
mod types;

pub use mode::{select_mode, D_MIN};
pub use parse::{format_response, parse_action, parse_response, MAX_MOVE};
pub use prompt::{build_prompt, depth_image, map_image, prompt_text, render_attachments, segmentation_image, template, Attachment, Prompt, CENTROID_SELECT_TEMPLATE, FREE_WAYPOINT_TEMPLATE};
pub use remote::{query_vlm, request_body, response_text, RemoteConfig, VlmPlanner, ENV_API_KEY, ENV_ENDPOINT, ENV_MODEL};
pub use resolve::{resolve_waypoint, ResolveError};
pub use rule::{plan_rule_based, RuleBasedPlanner};
pub use scripted::ScriptedPlanner;
pub use types::{Latency, PlannerError, PlannerMode, PlannerQuery, PlannerResponse, Reply, ResponseKind};

/// Source of raw planner text. The mission loop parses, resolves and verifies the answer.
pub trait Planner: Send {
    fn name(&self) -> &'static str;
    fn respond(&mut self, query: &PlannerQuery, prompt: &str) -> Result<Reply, PlannerError>;
    /// Answer latency in ticks when it is simulated; `None` for real wall-clock answers.
    fn simulated_latency_ticks(&self) -> Option<u64>;
}

impl Planner for Box<dyn Planner> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn respond(&mut self, query: &PlannerQuery, prompt: &str) -> Result<Reply, PlannerError> {
        (**self).respond(query, prompt)
    }

    fn simulated_latency_ticks(&self) -> Option<u64> {
        (**self).simulated_latency_ticks()
    }
}
