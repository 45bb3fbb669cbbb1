use alloc::string::String;
use alloc::vec;

use serde::{Deserialize, Serialize};

use super::{divide, insufficient, stream, Role, SplitError, SplitManifest, SplitParams, SplitRecord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomParams {
    pub train: usize,
    pub val: usize,
    pub id_test: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { train: 1_000_000, val: 30_000, id_test: 100_000 }
    }
}

const TAG_RANDOM: u64 = 1;

/// Uniform sample without replacement into train, val and id_test.
pub fn split_random(records: &[SplitRecord], params: &RandomParams, seed: u64) -> Result<SplitManifest, SplitError> {
    let need = params.train + params.val + params.id_test;
    if need > records.len() {
        return Err(insufficient("random", need, records.len()));
    }
    let all: vec::Vec<usize> = (0..records.len()).collect();
    let mut rng = stream(seed, &[TAG_RANDOM]);
    let parts = divide(&all, &[params.train, params.val, params.id_test], &mut rng);
    let mut roles = vec![None; records.len()];
    for (part, role) in parts.iter().zip([Role::Train, Role::Val, Role::IdTest]) {
        for &i in part {
            roles[i] = Some(role);
        }
    }
    Ok(SplitManifest::from_roles(
        String::from("random"),
        seed,
        SplitParams::Random(params.clone()),
        records,
        &roles,
    ))
}
