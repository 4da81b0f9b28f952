//! Simulated federated rounds.
//!
//! A run partitions a dataset across clients, gives each client a private
//! 80/20 split of its shard, and repeats for every round:
//!
//! 1. select clients ([`select_clients`]);
//! 2. broadcast the global parameters;
//! 3. each selected client trains locally and reports a [`LocalUpdate`]
//!    ([`local_round`]), which crosses to the aggregator only as its wire
//!    document;
//! 4. the aggregator averages parameters ([`aggregate_uniform`] or
//!    [`aggregate_size_weighted`]) and records the weighted global accuracy
//!    ([`global_accuracy`]).
//!
//! Clients train in parallel; updates are sorted by client id before
//! aggregation, so results do not depend on completion order.

mod aggregate;
mod client;
mod wire;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Partitioning};
use crate::models::{ModelKind, ModelParams, TrainConfig};
use crate::seed;
use crate::{Error, Result};

pub use aggregate::{aggregate_size_weighted, aggregate_uniform, global_accuracy};
pub use client::{local_round, setup_clients, ClientState};
pub use wire::{audit_wire_message, LocalUpdate, PARAMS_FIELDS, WIRE_FIELDS, WIRE_VERSION};

/// Which clients train in a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum Selector {
    #[default]
    All,
    FirstK {
        k: usize,
    },
    /// `k` clients drawn without replacement, seeded by run seed and round.
    RandomK {
        k: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Plain coordinate-wise mean over participating clients.
    #[default]
    Uniform,
    /// Mean weighted by each client's training-set size.
    SizeWeighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FederationConfig {
    pub n_clients: usize,
    pub rounds: usize,
    pub epochs_per_round: usize,
    pub selector: Selector,
    pub aggregation: Aggregation,
    /// Fraction of each shard used for local training; the rest is the local test split.
    pub train_fraction: f64,
    pub partitioning: Partitioning,
    pub train_cfg: TrainConfig,
    pub seed: u64,
}

impl Default for FederationConfig {
    fn default() -> Self {
        FederationConfig {
            n_clients: 3,
            rounds: 1,
            epochs_per_round: 20,
            selector: Selector::All,
            aggregation: Aggregation::Uniform,
            train_fraction: 0.8,
            partitioning: Partitioning::Iid,
            train_cfg: TrainConfig::default(),
            seed: 0,
        }
    }
}

impl FederationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_clients == 0 {
            return Err(Error::InvalidConfig("at least one client is required".into()));
        }
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("at least one round is required".into()));
        }
        if !self.train_cfg.model_kind.is_parametric() {
            return Err(Error::InvalidConfig(format!(
                "{} has no parameters to average; federate logistic or mlp",
                self.train_cfg.model_kind
            )));
        }
        match self.selector {
            Selector::FirstK { k } | Selector::RandomK { k } if k == 0 || k > self.n_clients => {
                Err(Error::InvalidConfig(format!(
                    "selector wants {k} of {} clients",
                    self.n_clients
                )))
            }
            _ => self.local_train_cfg().validate(),
        }
    }

    /// The per-round training configuration clients actually use.
    pub fn local_train_cfg(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs_per_round,
            ..self.train_cfg.clone()
        }
    }
}

/// Ids (ascending) of the clients that train in `round`.
pub fn select_clients(round: usize, client_ids: &[usize], cfg: &FederationConfig) -> Result<Vec<usize>> {
    if client_ids.is_empty() {
        return Err(Error::Empty("no clients to select from"));
    }
    let mut ids = client_ids.to_vec();
    ids.sort_unstable();
    let too_many = |k: usize| {
        Error::InvalidConfig(format!("selector wants {k} of {} clients", ids.len()))
    };
    Ok(match cfg.selector {
        Selector::All => ids,
        Selector::FirstK { k } => {
            if k > ids.len() {
                return Err(too_many(k));
            }
            ids.truncate(k);
            ids
        }
        Selector::RandomK { k } => {
            if k > ids.len() {
                return Err(too_many(k));
            }
            let mut rng = seed::rng(seed::derive(cfg.seed, "select", round as u64));
            let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, ids.len(), k)
                .into_iter()
                .map(|i| ids[i])
                .collect();
            picked.sort_unstable();
            picked
        }
    })
}

/// Starting global parameters: zeros for logistic, seeded uniform weights
/// for the network. Both match what centralized training starts from.
pub fn initial_params(cfg: &FederationConfig, n_features: usize) -> Result<ModelParams> {
    match cfg.train_cfg.model_kind {
        ModelKind::Logistic => Ok(ModelParams::zeros_linear(n_features)),
        ModelKind::Mlp => ModelParams::mlp_init(
            n_features,
            cfg.train_cfg.hidden_width,
            cfg.train_cfg.seed,
        ),
        other => Err(Error::InvalidConfig(format!("{other} cannot be federated"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClientMetrics {
    pub client_id: usize,
    pub accuracy: f64,
    pub sample_size: usize,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundMetrics {
    /// 1-based.
    pub round_index: usize,
    pub global_accuracy: f64,
    pub per_client: Vec<ClientMetrics>,
    pub participating: usize,
}

impl RoundMetrics {
    /// Global accuracy recomputed from the per-client entries.
    pub fn recompute_global_accuracy(&self) -> Result<f64> {
        aggregate::weighted_accuracy(self.per_client.iter().map(|c| (c.accuracy, c.sample_size)))
    }
}

/// Everything a finished run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct FederationRun {
    pub rounds: Vec<RoundMetrics>,
    pub final_params: ModelParams,
    /// Rows in each client's shard, by client id.
    pub shard_sizes: Vec<usize>,
    /// Rows in each client's local training split, by client id.
    pub train_sizes: Vec<usize>,
    /// Every aggregator-bound message, in round order then client order.
    pub transcript: Vec<String>,
}

/// Run the full simulation. Deterministic in `(d, cfg)`.
pub fn run_federation(d: &Dataset, cfg: &FederationConfig) -> Result<FederationRun> {
    cfg.validate()?;
    let mut clients = setup_clients(d, cfg)?;
    let ids: Vec<usize> = clients.iter().map(ClientState::client_id).collect();
    let mut global = initial_params(cfg, d.n_features())?;
    let mut rounds = Vec::with_capacity(cfg.rounds);
    let mut transcript = Vec::new();

    for round in 1..=cfg.rounds {
        let selected = select_clients(round, &ids, cfg)?;
        let mut wires: Vec<(usize, String)> = clients
            .par_iter_mut()
            .filter(|c| selected.binary_search(&c.client_id()).is_ok())
            .map(|c| {
                local_round(c, &global, cfg)
                    .map(|u| (u.client_id, u.to_wire()))
                    .map_err(|e| Error::Client {
                        client_id: c.client_id(),
                        round,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<_>>()?;
        wires.sort_by_key(|(id, _)| *id);

        // Aggregator side: only the wire documents are visible from here on.
        let updates = wires
            .iter()
            .map(|(_, w)| LocalUpdate::from_wire(w))
            .collect::<Result<Vec<_>>>()?;
        global = match cfg.aggregation {
            Aggregation::Uniform => aggregate_uniform(&updates)?,
            Aggregation::SizeWeighted => aggregate_size_weighted(&updates)?,
        };
        let metrics = RoundMetrics {
            round_index: round,
            global_accuracy: global_accuracy(&updates)?,
            per_client: updates
                .iter()
                .map(|u| ClientMetrics {
                    client_id: u.client_id,
                    accuracy: u.local_accuracy,
                    sample_size: u.sample_size,
                    loss: u.local_loss,
                })
                .collect(),
            participating: updates.len(),
        };
        log::info!(
            "round {round}: {} clients, global accuracy {:.4}",
            metrics.participating,
            metrics.global_accuracy
        );
        rounds.push(metrics);
        transcript.extend(wires.into_iter().map(|(_, w)| w));
    }

    Ok(FederationRun {
        rounds,
        final_params: global,
        shard_sizes: clients.iter().map(ClientState::shard_size).collect(),
        train_sizes: clients.iter().map(ClientState::train_size).collect(),
        transcript,
    })
}

/// Per-round CSV: one row per client plus an `all` summary row per round.
pub fn rounds_to_csv(rounds: &[RoundMetrics]) -> String {
    let mut s = String::from("round,client_id,acc,size\n");
    for r in rounds {
        for c in &r.per_client {
            s.push_str(&format!(
                "{},{},{},{}\n",
                r.round_index, c.client_id, c.accuracy, c.sample_size
            ));
        }
        let total: usize = r.per_client.iter().map(|c| c.sample_size).sum();
        s.push_str(&format!("{},all,{},{}\n", r.round_index, r.global_accuracy, total));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(selector: Selector) -> FederationConfig {
        FederationConfig {
            n_clients: 5,
            selector,
            seed: 17,
            ..FederationConfig::default()
        }
    }

    #[test]
    fn select_all() {
        let ids = [0, 1, 2, 3, 4];
        assert_eq!(select_clients(1, &ids, &cfg(Selector::All)).unwrap(), ids);
    }

    #[test]
    fn select_first_k() {
        let ids = [0, 1, 2, 3, 4];
        let got = select_clients(1, &ids, &cfg(Selector::FirstK { k: 2 })).unwrap();
        assert_eq!(got, [0, 1]);
    }

    #[test]
    fn random_k_is_seeded_by_round() {
        let ids: Vec<usize> = (0..20).collect();
        let c = cfg(Selector::RandomK { k: 4 });
        let a = select_clients(3, &ids, &c).unwrap();
        assert_eq!(a, select_clients(3, &ids, &c).unwrap());
        assert_eq!(a.len(), 4);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        let differs = (4..20).any(|r| select_clients(r, &ids, &c).unwrap() != a);
        assert!(differs);
    }

    #[test]
    fn k_larger_than_pool() {
        let ids = [0, 1];
        assert!(select_clients(1, &ids, &cfg(Selector::FirstK { k: 3 })).is_err());
        assert!(select_clients(1, &ids, &cfg(Selector::RandomK { k: 3 })).is_err());
        assert!(select_clients(1, &[], &cfg(Selector::All)).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = FederationConfig::default();
        assert!(c.validate().is_ok());
        c.rounds = 0;
        assert!(c.validate().is_err());
        let mut c = FederationConfig::default();
        c.train_cfg.model_kind = ModelKind::Tree;
        assert!(c.validate().is_err());
        let c = FederationConfig {
            selector: Selector::RandomK { k: 9 },
            ..FederationConfig::default()
        };
        assert!(c.validate().is_err());
        let c = FederationConfig {
            epochs_per_round: 0,
            ..FederationConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn csv_has_summary_rows() {
        let r = RoundMetrics {
            round_index: 1,
            global_accuracy: 0.75,
            per_client: vec![
                ClientMetrics { client_id: 0, accuracy: 0.5, sample_size: 2, loss: 0.0 },
                ClientMetrics { client_id: 1, accuracy: 1.0, sample_size: 2, loss: 0.0 },
            ],
            participating: 2,
        };
        assert_eq!(
            rounds_to_csv(&[r]),
            "round,client_id,acc,size\n1,0,0.5,2\n1,1,1,2\n1,all,0.75,4\n"
        );
    }
}
