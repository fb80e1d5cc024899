use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Zeros,
    Random,
    GlobalMean,
    NeighMean,
    MultiHop,
    PersPageRank,
    Heat,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Zeros,
        Method::Random,
        Method::GlobalMean,
        Method::NeighMean,
        Method::MultiHop,
        Method::PersPageRank,
        Method::Heat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Zeros => "zeros",
            Method::Random => "random",
            Method::GlobalMean => "global-mean",
            Method::NeighMean => "neigh-mean",
            Method::MultiHop => "multi-hop",
            Method::PersPageRank => "pers-page-rank",
            Method::Heat => "heat",
        }
    }

    /// Whether the method reads the item-item graph.
    pub fn uses_graph(self) -> bool {
        matches!(
            self,
            Method::NeighMean | Method::MultiHop | Method::PersPageRank | Method::Heat
        )
    }

    /// Diffusion steps used when none is given.
    pub fn default_hops(self) -> usize {
        match self {
            Method::MultiHop => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Ok(match key.as_str() {
            "zeros" => Method::Zeros,
            "random" => Method::Random,
            "global-mean" | "globalmean" => Method::GlobalMean,
            "neigh-mean" | "neighmean" => Method::NeighMean,
            "multi-hop" | "multihop" => Method::MultiHop,
            "pers-page-rank" | "perspagerank" | "ppr" => Method::PersPageRank,
            "heat" => Method::Heat,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "method: unknown method {s:?}"
                )))
            }
        })
    }
}

/// What isolated missing items receive after diffusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fallback {
    GlobalMean,
    Zeros,
}

impl FromStr for Fallback {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "global-mean" | "globalmean" => Ok(Fallback::GlobalMean),
            "zeros" => Ok(Fallback::Zeros),
            _ => Err(Error::InvalidConfig(format!(
                "fallback: unknown policy {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Fallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fallback::GlobalMean => "global-mean",
            Fallback::Zeros => "zeros",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationConfig {
    pub method: Method,
    /// TopN sparsification rate of the item-item graph.
    pub top_n: usize,
    /// Number of diffusion applications with reset in between.
    pub hops: usize,
    /// Restart probability of personalized PageRank.
    pub alpha: f64,
    /// Heat diffusion time.
    pub diffusion_time: f64,
    /// Terms kept in the Neumann / Taylor series.
    pub series_order: usize,
    /// Early stop on the relative Frobenius change of the missing rows; 0 disables.
    pub tolerance: f64,
    pub seed: u64,
    pub fallback: Fallback,
    /// Largest catalog for which PersPageRank solves the linear system exactly.
    pub dense_solve_threshold: usize,
}

impl ImputationConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            top_n: 20,
            hops: method.default_hops(),
            alpha: 0.15,
            diffusion_time: 1.0,
            series_order: 30,
            tolerance: 1e-6,
            seed: 42,
            fallback: Fallback::GlobalMean,
            dense_solve_threshold: 2048,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.diffusion_time >= 0.0 && self.diffusion_time.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "b must be finite and nonnegative, got {}",
                self.diffusion_time
            )));
        }
        if self.hops == 0 {
            return Err(Error::InvalidConfig("hops must be >= 1".into()));
        }
        if self.series_order == 0 {
            return Err(Error::InvalidConfig("series order must be >= 1".into()));
        }
        if self.top_n == 0 {
            return Err(Error::InvalidConfig("top_n must be >= 1".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

impl Default for ImputationConfig {
    fn default() -> Self {
        Self::new(Method::Heat)
    }
}
