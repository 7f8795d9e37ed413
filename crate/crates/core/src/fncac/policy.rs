use super::{extract_features, FncacModel, NetworkEnvironment};
use crate::policy::fuzzy::score_decision;
use crate::policy::{AdmissionDecision, AdmissionPolicy, RejectReason, SystemState};
use crate::traffic::{Scenario, TrafficClass};

/// One FNCAC decision. The network's input state carries over from the
/// previous call, so consecutive decisions see the recent traffic history.
/// Every request advances the network, including ones that cannot fit.
pub fn decide_fncac(
    model: &mut FncacModel,
    env: &mut NetworkEnvironment,
    state: &SystemState,
    class: &TrafficClass,
    a: f64,
) -> AdmissionDecision {
    if env.capacity() != state.capacity() {
        *env = env.resized(state.capacity());
    }
    let score = env
        .set_load(state.occupied_channels())
        .and_then(|_| extract_features(env, class, a))
        .and_then(|f| model.network.step(f.as_slice()));
    match score {
        Ok(s) if s.is_finite() => score_decision(s, state, class),
        _ => AdmissionDecision::Reject(RejectReason::PolicyScore),
    }
}

/// Simulation wrapper: resets the recurrent state and picks up the
/// scenario's utilization at the start of every run.
#[derive(Debug, Clone)]
pub struct FncacPolicy {
    pub model: FncacModel,
    env: NetworkEnvironment,
    utilization: f64,
}

impl FncacPolicy {
    pub fn new(model: FncacModel) -> Self {
        let env = model.env.clone();
        Self {
            model,
            env,
            utilization: 0.0,
        }
    }

    pub fn set_utilization(&mut self, a: f64) {
        self.utilization = a;
    }
}

impl AdmissionPolicy for FncacPolicy {
    fn name(&self) -> &str {
        "fncac"
    }

    fn begin_run(&mut self, scenario: &Scenario) {
        self.model.network.reset_state();
        self.env = self.model.env.resized(scenario.capacity);
        self.utilization = scenario.aggregate_utilization;
    }

    fn decide(&mut self, state: &SystemState, class: &TrafficClass) -> AdmissionDecision {
        decide_fncac(&mut self.model, &mut self.env, state, class, self.utilization)
    }
}
