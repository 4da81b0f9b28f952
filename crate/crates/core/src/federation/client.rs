use super::{FederationConfig, LocalUpdate};
use crate::data::{partition_indices, train_test_split, Dataset, SplitPair};
use crate::models::{evaluate, logistic_fit, mlp_fit, LogisticModel, MlpModel, Model, ModelKind, ModelParams};
use crate::seed;
use crate::{Error, Result};

/// A client and its private shard. The shard never leaves this struct.
#[derive(Debug)]
pub struct ClientState {
    client_id: usize,
    split: SplitPair,
    shard_size: usize,
}

impl ClientState {
    pub fn client_id(&self) -> usize {
        self.client_id
    }

    pub fn shard_size(&self) -> usize {
        self.shard_size
    }

    pub fn train_size(&self) -> usize {
        self.split.train.n_rows()
    }

    /// The local train/test split, for inspection in tests and reports.
    pub fn local_split(&self) -> &SplitPair {
        &self.split
    }
}

/// Partition `d` and give every client its own seeded local split.
///
/// Client `i` splits with seed `cfg.seed + i`, so a lone client splits
/// exactly like centralized training with `cfg.seed`.
pub fn setup_clients(d: &Dataset, cfg: &FederationConfig) -> Result<Vec<ClientState>> {
    let shards = partition_indices(
        d,
        cfg.n_clients,
        seed::derive(cfg.seed, "partition", 0),
        cfg.partitioning,
    )?;
    shards
        .iter()
        .enumerate()
        .map(|(i, idx)| {
            let shard = d.subset(idx);
            let split = train_test_split(&shard, cfg.train_fraction, cfg.seed.wrapping_add(i as u64))
                .map_err(|e| Error::Client {
                    client_id: i,
                    round: 0,
                    source: Box::new(e),
                })?;
            Ok(ClientState {
                client_id: i,
                split,
                shard_size: idx.len(),
            })
        })
        .collect()
}

/// Train from `global` on the local train split and score on the local test split.
pub fn local_round(client: &mut ClientState, global: &ModelParams, cfg: &FederationConfig) -> Result<LocalUpdate> {
    let train_cfg = cfg.local_train_cfg();
    let train = &client.split.train;
    let model = match train_cfg.model_kind {
        ModelKind::Logistic => Model::Logistic(LogisticModel {
            params: logistic_fit(train, global, &train_cfg)?,
        }),
        ModelKind::Mlp => Model::Mlp(MlpModel {
            params: mlp_fit(train, global, &train_cfg)?,
        }),
        other => return Err(Error::InvalidConfig(format!("{other} cannot be federated"))),
    };
    let report = evaluate(&model, &client.split.test)?;
    Ok(LocalUpdate {
        client_id: client.client_id,
        params: model.params().expect("parametric model").clone(),
        sample_size: train.n_rows(),
        local_accuracy: report.accuracy,
        local_loss: report.loss,
    })
}
