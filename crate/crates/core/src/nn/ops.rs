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

//! Layer primitives on channel-major square feature maps.
//!
//! Convolutions use "same" zero padding and carry no bias. Weights are laid
//! out `[out, in, k, k]` for convolutions and `[out, in]` for dense layers.

use super::{Family, Network, NnError, Prediction, BN_EPSILON, NO_PASS_LOGIT};

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMap {
    pub channels: usize,
    pub side: usize,
    /// `channels * side * side` values, channel-major then row-major.
    pub data: Vec<f32>,
}

impl FeatureMap {
    pub fn new(channels: usize, side: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), channels * side * side, "feature map length");
        FeatureMap { channels, side, data }
    }

    pub fn zeros(channels: usize, side: usize) -> Self {
        FeatureMap { channels, side, data: vec![0.0; channels * side * side] }
    }

    pub fn area(&self) -> usize {
        self.side * self.side
    }

    pub fn plane(&self, c: usize) -> &[f32] {
        let a = self.area();
        &self.data[c * a..(c + 1) * a]
    }

    pub fn get(&self, c: usize, row: usize, col: usize) -> f32 {
        self.data[(c * self.side + row) * self.side + col]
    }
}

fn mismatch(msg: String) -> NnError {
    NnError::ShapeMismatch(msg)
}

/// `out += w * shift(input, dy, dx)` over one plane, with zero padding.
#[inline]
fn shifted_axpy(out: &mut [f32], input: &[f32], n: usize, w: f32, dy: isize, dx: isize) {
    let y0 = (-dy).max(0) as usize;
    let y1 = (n as isize - dy).min(n as isize) as usize;
    let x0 = (-dx).max(0) as usize;
    let x1 = (n as isize - dx).min(n as isize) as usize;
    for y in y0..y1 {
        let sy = (y as isize + dy) as usize;
        let src = &input[sy * n + (x0 as isize + dx) as usize..sy * n + (x1 as isize + dx) as usize];
        let dst = &mut out[y * n + x0..y * n + x1];
        for (d, s) in dst.iter_mut().zip(src) {
            *d += w * s;
        }
    }
}

/// Dense convolution with a square `k x k` kernel (`k` odd).
pub fn conv2d(x: &FeatureMap, weight: &[f32], out_channels: usize, k: usize) -> Result<FeatureMap, NnError> {
    if k % 2 == 0 || weight.len() != out_channels * x.channels * k * k {
        return Err(mismatch(format!(
            "conv weight has {} values, expected {}x{}x{k}x{k}",
            weight.len(),
            out_channels,
            x.channels
        )));
    }
    let n = x.side;
    let a = x.area();
    let half = (k / 2) as isize;
    let mut out = FeatureMap::zeros(out_channels, n);
    for (co, dst) in out.data.chunks_exact_mut(a).enumerate() {
        for ci in 0..x.channels {
            let src = x.plane(ci);
            let kern = &weight[(co * x.channels + ci) * k * k..][..k * k];
            if k == 1 {
                let w = kern[0];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
                continue;
            }
            for ky in 0..k {
                for kx in 0..k {
                    let w = kern[ky * k + kx];
                    if w != 0.0 {
                        shifted_axpy(dst, src, n, w, ky as isize - half, kx as isize - half);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Depthwise 3x3 convolution: one kernel per channel.
pub fn depthwise_conv3x3(x: &FeatureMap, weight: &[f32]) -> Result<FeatureMap, NnError> {
    if weight.len() != x.channels * 9 {
        return Err(mismatch(format!("depthwise weight has {} values, expected {}x9", weight.len(), x.channels)));
    }
    let n = x.side;
    let a = x.area();
    let mut out = FeatureMap::zeros(x.channels, n);
    for (c, dst) in out.data.chunks_exact_mut(a).enumerate() {
        let src = x.plane(c);
        for ky in 0..3 {
            for kx in 0..3 {
                shifted_axpy(dst, src, n, weight[c * 9 + ky * 3 + kx], ky as isize - 1, kx as isize - 1);
            }
        }
    }
    Ok(out)
}

/// Inference batch norm; `params` holds gamma, beta, mean and variance rows.
pub fn batch_norm(x: &mut FeatureMap, params: &[f32]) -> Result<(), NnError> {
    let c = x.channels;
    if params.len() != 4 * c {
        return Err(mismatch(format!("batch norm has {} values, expected 4x{c}", params.len())));
    }
    let a = x.area();
    for (ch, plane) in x.data.chunks_exact_mut(a).enumerate() {
        let (gamma, beta, mean, var) = (params[ch], params[c + ch], params[2 * c + ch], params[3 * c + ch]);
        let scale = gamma / (var + BN_EPSILON).sqrt();
        let shift = beta - mean * scale;
        for v in plane {
            *v = *v * scale + shift;
        }
    }
    Ok(())
}

pub fn relu(xs: &mut [f32]) {
    for v in xs {
        *v = v.max(0.0);
    }
}

pub fn sigmoid(z: f32) -> f32 {
    1.0 / (1.0 + (-z).exp())
}

pub fn global_avg_pool(x: &FeatureMap) -> Vec<f32> {
    let a = x.area() as f32;
    x.data.chunks_exact(x.area()).map(|p| p.iter().sum::<f32>() / a).collect()
}

/// `w @ x + bias` with `w` stored `[out, in]`.
pub fn dense(x: &[f32], weight: &[f32], bias: Option<&[f32]>) -> Result<Vec<f32>, NnError> {
    if x.is_empty() || weight.len() % x.len() != 0 {
        return Err(mismatch(format!("dense weight of {} values for input of {}", weight.len(), x.len())));
    }
    let out = weight.len() / x.len();
    if bias.is_some_and(|b| b.len() != out) {
        return Err(mismatch(format!("dense bias length, expected {out}")));
    }
    Ok(weight
        .chunks_exact(x.len())
        .enumerate()
        .map(|(o, row)| {
            let dot: f32 = row.iter().zip(x).map(|(w, v)| w * v).sum();
            dot + bias.map_or(0.0, |b| b[o])
        })
        .collect())
}

/// Squeeze-and-excitation: pools each channel, passes the pooled vector
/// through `reduce` (relu) and `expand` (sigmoid), and rescales channels by
/// the result. `reduce` is `[r, C]` and `expand` is `[C, r]`.
pub fn se_forward(x: &FeatureMap, reduce: &[f32], expand: &[f32]) -> Result<FeatureMap, NnError> {
    let c = x.channels;
    if c == 0 || reduce.len() % c != 0 || reduce.is_empty() || expand.len() != reduce.len() {
        return Err(mismatch(format!(
            "SE weights {} and {} do not fit {c} channels",
            reduce.len(),
            expand.len()
        )));
    }
    let pooled = global_avg_pool(x);
    let mut hidden = dense(&pooled, reduce, None)?;
    relu(&mut hidden);
    let gates: Vec<f32> = dense(&hidden, expand, None)?.into_iter().map(sigmoid).collect();
    let mut out = x.clone();
    let a = x.area();
    for (plane, g) in out.data.chunks_exact_mut(a).zip(&gates) {
        for v in plane {
            *v *= g;
        }
    }
    Ok(out)
}

fn tensor<'a>(net: &'a Network, name: &str) -> &'a [f32] {
    &net.tensor(name).unwrap_or_else(|| panic!("layer {name} missing")).data
}

/// Full forward pass for one validated input.
pub(super) fn run_network(net: &Network, input: FeatureMap) -> Prediction {
    const VALID: &str = "layout validated at construction";
    let desc = net.descriptor();
    let w = desc.trunk_planes;
    let b = desc.block_planes;

    let mut h = conv2d(&input, tensor(net, "stem.conv"), w, 3).expect(VALID);
    batch_norm(&mut h, tensor(net, "stem.bn")).expect(VALID);
    relu(&mut h.data);

    for i in 0..desc.blocks {
        let t = |layer: &str| tensor(net, &format!("blocks.{i}.{layer}"));
        match desc.family {
            Family::MobileSe | Family::Mobile => {
                let mut e = conv2d(&h, t("expand"), b, 1).expect(VALID);
                batch_norm(&mut e, t("expand_bn")).expect(VALID);
                relu(&mut e.data);
                let mut d = depthwise_conv3x3(&e, t("depthwise")).expect(VALID);
                batch_norm(&mut d, t("depthwise_bn")).expect(VALID);
                relu(&mut d.data);
                let mut p = conv2d(&d, t("project"), w, 1).expect(VALID);
                batch_norm(&mut p, t("project_bn")).expect(VALID);
                if desc.family == Family::MobileSe {
                    p = se_forward(&p, t("se_reduce"), t("se_expand")).expect(VALID);
                }
                for (hv, pv) in h.data.iter_mut().zip(&p.data) {
                    *hv += pv;
                }
            }
            Family::Residual => {
                let mut r = conv2d(&h, t("conv1"), w, 3).expect(VALID);
                batch_norm(&mut r, t("bn1")).expect(VALID);
                relu(&mut r.data);
                let mut r = conv2d(&r, t("conv2"), w, 3).expect(VALID);
                batch_norm(&mut r, t("bn2")).expect(VALID);
                for (hv, rv) in h.data.iter_mut().zip(&r.data) {
                    *hv = (*hv + rv).max(0.0);
                }
            }
        }
    }

    let pooled = global_avg_pool(&h);
    let mut policy_logits = conv2d(&h, tensor(net, "policy.conv"), 1, 1).expect(VALID).data;
    let pass = if desc.pass_logit {
        dense(&pooled, tensor(net, "policy.pass.weight"), Some(tensor(net, "policy.pass.bias"))).expect(VALID)[0]
    } else {
        NO_PASS_LOGIT
    };
    policy_logits.push(pass);

    let mut hidden =
        dense(&pooled, tensor(net, "value.fc1.weight"), Some(tensor(net, "value.fc1.bias"))).expect(VALID);
    relu(&mut hidden);
    let z = dense(&hidden, tensor(net, "value.fc2.weight"), Some(tensor(net, "value.fc2.bias"))).expect(VALID)[0];
    // Keep the value strictly inside (0, 1) even when the sigmoid saturates.
    let value = sigmoid(z).clamp(f32::EPSILON, 1.0 - f32::EPSILON);
    Prediction { policy_logits, value }
}
