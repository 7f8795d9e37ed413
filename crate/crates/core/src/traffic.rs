//! QoS traffic classes, their Poisson/exponential behaviour, and scenario
//! construction.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CacError, Result};

/// Number of QoS classes in the default three-class cell.
pub const NUM_CLASSES: usize = 3;

/// Class labels in class-id order.
pub const CLASS_NAMES: [&str; NUM_CLASSES] = ["conversational", "interactive", "background"];

/// One QoS class: Poisson arrivals at `arrival_rate`, exponential holding with
/// rate `service_rate`, each call occupying `channel_demand` channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficClass {
    pub id: u8,
    pub name: String,
    pub channel_demand: u32,
    pub arrival_rate: f64,
    pub service_rate: f64,
}

impl TrafficClass {
    pub fn new(id: u8, name: impl Into<String>, channel_demand: u32, arrival_rate: f64, service_rate: f64) -> Result<Self> {
        let class = Self {
            id,
            name: name.into(),
            channel_demand,
            arrival_rate,
            service_rate,
        };
        class.validate()?;
        Ok(class)
    }

    /// Zero arrival rate is accepted so that an idle class can be expressed.
    pub fn validate(&self) -> Result<()> {
        if self.channel_demand == 0 {
            return Err(invalid(format!("class {}: channel demand must be positive", self.id)));
        }
        if !(self.arrival_rate.is_finite() && self.arrival_rate >= 0.0) {
            return Err(invalid(format!("class {}: arrival rate must be finite and >= 0", self.id)));
        }
        if !(self.service_rate.is_finite() && self.service_rate > 0.0) {
            return Err(invalid(format!("class {}: service rate must be finite and > 0", self.id)));
        }
        Ok(())
    }

    /// Offered load λ/μ in Erlangs.
    pub fn utilization(&self) -> f64 {
        self.arrival_rate / self.service_rate
    }

    /// Class label in `type{id}` form, as used in CSV output.
    pub fn type_label(&self) -> String {
        format!("type{}", self.id)
    }
}

/// Free-function form of [`TrafficClass::utilization`].
pub fn utilization(class: &TrafficClass) -> f64 {
    class.utilization()
}

fn exponential<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    if rate == 0.0 {
        return f64::INFINITY;
    }
    Exp::new(rate).expect("rate validated positive").sample(rng)
}

/// Time to the next arrival of `class`, exponential with mean 1/λ.
/// An idle class (λ = 0) never arrives and yields `+∞`.
pub fn sample_interarrival<R: Rng + ?Sized>(class: &TrafficClass, rng: &mut R) -> f64 {
    exponential(class.arrival_rate, rng)
}

/// Holding time of one call of `class`, exponential with mean 1/μ.
pub fn sample_holding<R: Rng + ?Sized>(class: &TrafficClass, rng: &mut R) -> f64 {
    exponential(class.service_rate, rng)
}

/// How a utilization value `a` is turned into per-class arrival rates
/// (service rates are fixed to 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoadModel {
    /// λ_i = a for every class.
    PerClass,
    /// λ_i = a·N/3: the total call-level load Σλ_i/μ equals a·N, so `a` is
    /// the offered utilization per channel of the cell.
    #[default]
    PerChannel,
}

impl LoadModel {
    pub fn label(self) -> &'static str {
        match self {
            LoadModel::PerClass => "per-class",
            LoadModel::PerChannel => "per-channel",
        }
    }
}

impl std::str::FromStr for LoadModel {
    type Err = CacError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-class" => Ok(LoadModel::PerClass),
            "per-channel" => Ok(LoadModel::PerChannel),
            other => Err(invalid(format!("unknown load model `{other}` (expected per-class or per-channel)"))),
        }
    }
}

/// A cell of `capacity` virtual channels offered a set of traffic classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub capacity: u32,
    #[serde(default)]
    pub aggregate_utilization: f64,
    pub classes: Vec<TrafficClass>,
}

impl Scenario {
    pub fn new(capacity: u32, aggregate_utilization: f64, classes: Vec<TrafficClass>) -> Result<Self> {
        let s = Self {
            capacity,
            aggregate_utilization,
            classes,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(invalid("scenario needs at least one traffic class"));
        }
        for c in &self.classes {
            c.validate()?;
        }
        let max_demand = self.max_demand();
        if self.capacity < max_demand {
            return Err(invalid(format!(
                "capacity {} is below the largest channel demand {}",
                self.capacity, max_demand
            )));
        }
        if !(self.aggregate_utilization.is_finite() && self.aggregate_utilization >= 0.0) {
            return Err(invalid("aggregate utilization must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn max_demand(&self) -> u32 {
        self.classes.iter().map(|c| c.channel_demand).max().unwrap_or(0)
    }

    /// Builds the three-class cell (demands 1, 2, 3) at utilization `a`.
    pub fn at_load(a: f64, capacity: u32, model: LoadModel) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(invalid(format!("utilization must be finite and >= 0, got {a}")));
        }
        if capacity < 3 {
            return Err(invalid(format!("capacity must be at least 3 (N >= 3), got {capacity}")));
        }
        let rate = match model {
            LoadModel::PerClass => a,
            LoadModel::PerChannel => a * f64::from(capacity) / NUM_CLASSES as f64,
        };
        let classes = (0..NUM_CLASSES)
            .map(|i| TrafficClass::new(i as u8 + 1, CLASS_NAMES[i], i as u32 + 1, rate, 1.0))
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(capacity, a, classes)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| CacError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario is always representable as TOML")
    }
}

/// Equal-rate three-class scenario: λ_1 = λ_2 = λ_3 = a with μ = 1.
pub fn build_equal_rate_scenario(a: f64, capacity: u32) -> Result<Scenario> {
    Scenario::at_load(a, capacity, LoadModel::PerClass)
}
