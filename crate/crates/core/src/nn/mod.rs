// Copyright 2026 The gpgo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Policy/value networks: MobileNet blocks with squeeze-and-excitation, and
//! residual blocks, both with Polygames-style heads.
//!
//! Layer layout for a MobileSE network of depth `d`, trunk `w`, block
//! planes `b` and SE reduction `r = max(w / se_ratio, 1)`:
//!
//! ```text
//! stem      3x3 conv in->w, batch norm, relu
//! block     1x1 conv w->b, bn, relu
//!           3x3 depthwise conv on b, bn, relu
//!           1x1 conv b->w, bn
//!           SE on w (dense w->r relu, dense r->w sigmoid, no biases)
//!           add skip
//! policy    1x1 conv w->1 for the board points,
//!           global average pool + dense w->1 (with bias) for pass
//! value     global average pool, dense w->50 relu, dense 50->1 sigmoid
//! ```
//!
//! Convolutions carry no bias; every one is followed by a batch norm stored
//! as inference statistics (gamma, beta, mean, variance). A residual block
//! is `3x3 conv, bn, relu, 3x3 conv, bn, add skip, relu`.

mod bench;
mod io;
pub mod ops;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::SUPPORTED_SIZES;
use crate::encoding::{InputTensor, NUM_PLANES};

pub use self::bench::{bench_forward, BenchResult};
pub use self::io::{load_weights, save_weights, FORMAT_VERSION, MAGIC};
pub use self::ops::{se_forward, FeatureMap};

/// Width of the hidden value-head layer.
pub const VALUE_HIDDEN: usize = 50;

/// Batch norm epsilon, as in Keras.
pub const BN_EPSILON: f32 = 1e-3;

/// Pass logit used by networks built without a pass unit.
pub const NO_PASS_LOGIT: f32 = -1.0e4;

#[derive(Debug, Error, PartialEq)]
pub enum NnError {
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("shape mismatch at layer {layer}: {msg}")]
    LayerMismatch { layer: usize, msg: String },
    #[error("bad magic")]
    BadMagic,
    #[error("format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("plane-order hash {found:#018x} does not match {expected:#018x}")]
    PlaneOrderMismatch { found: u64, expected: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    MobileSe,
    Mobile,
    Residual,
}

impl Family {
    fn code(self) -> u32 {
        match self {
            Family::MobileSe => 0,
            Family::Mobile => 1,
            Family::Residual => 2,
        }
    }

    fn from_code(code: u32) -> Option<Family> {
        match code {
            0 => Some(Family::MobileSe),
            1 => Some(Family::Mobile),
            2 => Some(Family::Residual),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkDescriptor {
    pub family: Family,
    pub blocks: usize,
    pub trunk_planes: usize,
    /// Expanded width inside a mobile block; equals `trunk_planes` for
    /// residual networks.
    pub block_planes: usize,
    pub se_ratio: usize,
    pub input_planes: usize,
    pub board_size: usize,
    /// Whether the policy head has a dense pass unit.
    pub pass_logit: bool,
}

impl NetworkDescriptor {
    pub fn mobile_se(blocks: usize, block_planes: usize, trunk_planes: usize, board_size: usize) -> Self {
        NetworkDescriptor {
            family: Family::MobileSe,
            blocks,
            trunk_planes,
            block_planes,
            se_ratio: 16,
            input_planes: NUM_PLANES,
            board_size,
            pass_logit: true,
        }
    }

    /// MobileSE with the default 6x expansion.
    pub fn mobile_se_default(blocks: usize, trunk_planes: usize, board_size: usize) -> Self {
        Self::mobile_se(blocks, 6 * trunk_planes, trunk_planes, board_size)
    }

    pub fn mobile(blocks: usize, block_planes: usize, trunk_planes: usize, board_size: usize) -> Self {
        NetworkDescriptor { family: Family::Mobile, ..Self::mobile_se(blocks, block_planes, trunk_planes, board_size) }
    }

    pub fn residual(blocks: usize, planes: usize, board_size: usize) -> Self {
        NetworkDescriptor {
            family: Family::Residual,
            blocks,
            trunk_planes: planes,
            block_planes: planes,
            se_ratio: 16,
            input_planes: NUM_PLANES,
            board_size,
            pass_logit: true,
        }
    }

    pub fn se_width(&self) -> usize {
        (self.trunk_planes / self.se_ratio.max(1)).max(1)
    }

    pub fn validate(&self) -> Result<(), NnError> {
        let bad = |m: &str| Err(NnError::InvalidDescriptor(m.to_string()));
        if self.blocks == 0 {
            return bad("at least one block is required");
        }
        if self.trunk_planes == 0 || self.block_planes == 0 {
            return bad("plane counts must be positive");
        }
        if self.family == Family::MobileSe && self.se_ratio == 0 {
            return bad("se_ratio must be positive");
        }
        if self.family == Family::Residual && self.block_planes != self.trunk_planes {
            return bad("residual networks have block_planes == trunk_planes");
        }
        if self.input_planes == 0 {
            return bad("input_planes must be positive");
        }
        if !SUPPORTED_SIZES.contains(&self.board_size) {
            return bad("unsupported board size");
        }
        Ok(())
    }

    /// Name in the `se.<blocks>.<block_planes>.<trunk>` /
    /// `residual.<blocks>.<planes>` scheme.
    pub fn name(&self) -> String {
        match self.family {
            Family::MobileSe => format!("se.{}.{}.{}", self.blocks, self.block_planes, self.trunk_planes),
            Family::Mobile => format!("mobile.{}.{}.{}", self.blocks, self.block_planes, self.trunk_planes),
            Family::Residual => format!("residual.{}.{}", self.blocks, self.trunk_planes),
        }
    }

    /// Parses a descriptor name for the given board size.
    pub fn parse(name: &str, board_size: usize) -> Result<Self, NnError> {
        let bad = || NnError::InvalidDescriptor(format!("cannot parse {name:?}"));
        let parts: Vec<&str> = name.trim().split('.').collect();
        let nums = |xs: &[&str]| -> Result<Vec<usize>, NnError> {
            xs.iter().map(|x| x.parse::<usize>().map_err(|_| bad())).collect()
        };
        let desc = match parts.as_slice() {
            ["se", rest @ ..] | ["mobile", rest @ ..] if rest.len() == 3 => {
                let n = nums(rest)?;
                let d = Self::mobile_se(n[0], n[1], n[2], board_size);
                if parts[0] == "mobile" {
                    NetworkDescriptor { family: Family::Mobile, ..d }
                } else {
                    d
                }
            }
            ["residual", rest @ ..] if rest.len() == 2 => {
                let n = nums(rest)?;
                Self::residual(n[0], n[1], board_size)
            }
            _ => return Err(bad()),
        };
        desc.validate()?;
        Ok(desc)
    }

    /// Names and shapes of every tensor, in serialization order.
    pub fn layer_specs(&self) -> Vec<TensorSpec> {
        let w = self.trunk_planes;
        let b = self.block_planes;
        let mut specs = Vec::new();
        let mut push = |name: String, dims: Vec<usize>| specs.push(TensorSpec { name, dims });
        push("stem.conv".into(), vec![w, self.input_planes, 3, 3]);
        push("stem.bn".into(), vec![4, w]);
        for i in 0..self.blocks {
            match self.family {
                Family::MobileSe | Family::Mobile => {
                    push(format!("blocks.{i}.expand"), vec![b, w, 1, 1]);
                    push(format!("blocks.{i}.expand_bn"), vec![4, b]);
                    push(format!("blocks.{i}.depthwise"), vec![b, 1, 3, 3]);
                    push(format!("blocks.{i}.depthwise_bn"), vec![4, b]);
                    push(format!("blocks.{i}.project"), vec![w, b, 1, 1]);
                    push(format!("blocks.{i}.project_bn"), vec![4, w]);
                    if self.family == Family::MobileSe {
                        let r = self.se_width();
                        push(format!("blocks.{i}.se_reduce"), vec![r, w]);
                        push(format!("blocks.{i}.se_expand"), vec![w, r]);
                    }
                }
                Family::Residual => {
                    push(format!("blocks.{i}.conv1"), vec![w, w, 3, 3]);
                    push(format!("blocks.{i}.bn1"), vec![4, w]);
                    push(format!("blocks.{i}.conv2"), vec![w, w, 3, 3]);
                    push(format!("blocks.{i}.bn2"), vec![4, w]);
                }
            }
        }
        push("policy.conv".into(), vec![1, w, 1, 1]);
        if self.pass_logit {
            push("policy.pass.weight".into(), vec![1, w]);
            push("policy.pass.bias".into(), vec![1]);
        }
        push("value.fc1.weight".into(), vec![VALUE_HIDDEN, w]);
        push("value.fc1.bias".into(), vec![VALUE_HIDDEN]);
        push("value.fc2.weight".into(), vec![1, VALUE_HIDDEN]);
        push("value.fc2.bias".into(), vec![1]);
        specs
    }

    /// Parameter count per component: stem, each block kind, and heads.
    pub fn param_breakdown(&self) -> Vec<(String, usize)> {
        let mut groups: Vec<(String, usize)> = Vec::new();
        for spec in self.layer_specs() {
            let group = if let Some(rest) = spec.name.strip_prefix("blocks.") {
                // Collapse the block index so all blocks share one row.
                let layer = rest.split_once('.').map_or(rest, |(_, l)| l);
                format!("blocks.*.{layer}")
            } else {
                spec.name.clone()
            };
            let n = spec.len();
            match groups.iter_mut().find(|(g, _)| *g == group) {
                Some((_, count)) => *count += n,
                None => groups.push((group, n)),
            }
        }
        groups
    }
}

impl fmt::Display for NetworkDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for NetworkDescriptor {
    type Err = NnError;

    /// Parses a name for a 19x19 board.
    fn from_str(s: &str) -> Result<Self, NnError> {
        NetworkDescriptor::parse(s, 19)
    }
}

/// Exact number of scalars in [`build`] (and in a saved weight file).
pub fn param_count(desc: &NetworkDescriptor) -> usize {
    desc.layer_specs().iter().map(TensorSpec::len).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorSpec {
    pub name: String,
    pub dims: Vec<usize>,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub dims: Vec<usize>,
    pub data: Vec<f32>,
}

/// Forward-pass result for one position.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    /// `size * size + 1` logits, pass last.
    pub policy_logits: Vec<f32>,
    /// Probability that White wins, in (0, 1).
    pub value: f32,
}

/// A descriptor and its weights. Immutable once built; forward passes may
/// run concurrently.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    desc: NetworkDescriptor,
    tensors: Vec<Tensor>,
}

impl Network {
    pub fn descriptor(&self) -> &NetworkDescriptor {
        &self.desc
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensor(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    pub fn tensor_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.tensors.iter_mut().find(|t| t.name == name)
    }

    pub fn num_params(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }

    /// Builds from tensors, checking names and shapes against the layout.
    pub fn from_tensors(desc: NetworkDescriptor, tensors: Vec<Tensor>) -> Result<Network, NnError> {
        desc.validate()?;
        let specs = desc.layer_specs();
        if specs.len() != tensors.len() {
            return Err(NnError::ShapeMismatch(format!(
                "expected {} tensors, got {}",
                specs.len(),
                tensors.len()
            )));
        }
        for (k, (spec, t)) in specs.iter().zip(&tensors).enumerate() {
            if spec.name != t.name || spec.dims != t.dims || t.data.len() != spec.len() {
                return Err(NnError::LayerMismatch {
                    layer: k,
                    msg: format!("expected {} {:?}, got {} {:?}", spec.name, spec.dims, t.name, t.dims),
                });
            }
        }
        Ok(Network { desc, tensors })
    }

    /// Every weight zero: value 0.5 and all-zero logits for any input.
    pub fn zeros(desc: &NetworkDescriptor) -> Result<Network, NnError> {
        desc.validate()?;
        let tensors = desc
            .layer_specs()
            .into_iter()
            .map(|s| Tensor { data: vec![0.0; s.len()], name: s.name, dims: s.dims })
            .collect();
        Ok(Network { desc: *desc, tensors })
    }
}

/// Builds a network with seeded random weights. Convolution and dense
/// weights are uniform with variance `1 / fan_in`; batch norms start as the
/// identity except after each block's last convolution, whose scale is
/// `1 / sqrt(blocks)` so activations stay bounded in deep trunks.
pub fn build(desc: &NetworkDescriptor, init_seed: u64) -> Result<Network, NnError> {
    desc.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(init_seed);
    let branch_scale = 1.0 / (desc.blocks as f32).sqrt();
    let mut tensors = Vec::new();
    for spec in desc.layer_specs() {
        let n = spec.len();
        let data = if spec.name.ends_with("bn") || spec.name.ends_with("bn1") || spec.name.ends_with("bn2") {
            let c = spec.dims[1];
            let last_in_block =
                spec.name.ends_with("project_bn") || spec.name.ends_with("bn2");
            let gamma = if last_in_block { branch_scale } else { 1.0 };
            let mut v = vec![0.0; n];
            v[..c].fill(gamma);
            v[3 * c..].fill(1.0);
            v
        } else if spec.name.ends_with("bias") {
            vec![0.0; n]
        } else {
            let fan_in: usize = spec.dims[1..].iter().product();
            let bound = (3.0 / fan_in as f32).sqrt();
            (0..n).map(|_| rng.gen_range(-bound..=bound)).collect()
        };
        tensors.push(Tensor { name: spec.name, dims: spec.dims, data });
    }
    Ok(Network { desc: *desc, tensors })
}

impl Network {
    /// Runs each input through the network. Outputs do not depend on how
    /// inputs are batched.
    pub fn forward(&self, inputs: &[InputTensor]) -> Result<Vec<Prediction>, NnError> {
        inputs.iter().map(|x| self.forward_one(x)).collect()
    }

    pub fn forward_one(&self, input: &InputTensor) -> Result<Prediction, NnError> {
        if input.size() != self.desc.board_size || input.num_planes() != self.desc.input_planes {
            return Err(NnError::ShapeMismatch(format!(
                "input {}x{}x{} does not match {}",
                input.num_planes(),
                input.size(),
                input.size(),
                self.desc.name()
            )));
        }
        let map = FeatureMap::new(self.desc.input_planes, self.desc.board_size, input.to_f32());
        Ok(ops::run_network(self, map))
    }
}

#[cfg(test)]
mod tests;
