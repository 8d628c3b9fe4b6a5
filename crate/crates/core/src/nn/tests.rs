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

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ops::*;
use super::*;
use crate::board::tests::random_game;
use crate::board::Board;
use crate::encoding::{encode, Symmetry};

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f32> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_map(rng: &mut ChaCha8Rng, c: usize, side: usize) -> FeatureMap {
    FeatureMap::new(c, side, random_vec(rng, c * side * side))
}

/// Textbook convolution with explicit bounds checks.
fn reference_conv(x: &FeatureMap, w: &[f32], cout: usize, k: usize, depthwise: bool) -> FeatureMap {
    let n = x.side as isize;
    let half = (k / 2) as isize;
    let mut out = FeatureMap::zeros(cout, x.side);
    for co in 0..cout {
        for r in 0..n {
            for c in 0..n {
                let mut acc = 0.0f64;
                let inputs: Vec<usize> = if depthwise { vec![co] } else { (0..x.channels).collect() };
                for (j, &ci) in inputs.iter().enumerate() {
                    for ky in 0..k as isize {
                        for kx in 0..k as isize {
                            let (rr, cc) = (r + ky - half, c + kx - half);
                            if rr < 0 || cc < 0 || rr >= n || cc >= n {
                                continue;
                            }
                            let widx = if depthwise {
                                (co * k + ky as usize) * k + kx as usize
                            } else {
                                ((co * inputs.len() + j) * k + ky as usize) * k + kx as usize
                            };
                            acc += w[widx] as f64 * x.get(ci, rr as usize, cc as usize) as f64;
                        }
                    }
                }
                out.data[(co * x.side + r as usize) * x.side + c as usize] = acc as f32;
            }
        }
    }
    out
}

fn assert_close(a: &[f32], b: &[f32], tol: f32) {
    assert_eq!(a.len(), b.len());
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        assert!((x - y).abs() <= tol * y.abs().max(1.0), "index {i}: {x} vs {y}");
    }
}

#[test]
fn conv_matches_scalar_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for &(cin, cout, k, side) in &[(3, 4, 3, 5), (5, 2, 1, 7), (2, 3, 3, 1), (1, 1, 5, 6)] {
        let x = random_map(&mut rng, cin, side);
        let w = random_vec(&mut rng, cout * cin * k * k);
        let got = conv2d(&x, &w, cout, k).unwrap();
        assert_close(&got.data, &reference_conv(&x, &w, cout, k, false).data, 1e-6);
    }
    let x = random_map(&mut rng, 3, 5);
    assert!(conv2d(&x, &[0.0; 10], 2, 3).is_err());
}

#[test]
fn depthwise_matches_scalar_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = random_map(&mut rng, 6, 9);
    let w = random_vec(&mut rng, 6 * 9);
    let got = depthwise_conv3x3(&x, &w).unwrap();
    assert_close(&got.data, &reference_conv(&x, &w, 6, 3, true).data, 1e-6);
}

#[test]
fn batch_norm_dense_and_se_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = random_map(&mut rng, 4, 3);

    let mut params = random_vec(&mut rng, 16);
    for v in &mut params[12..] {
        *v = v.abs() + 0.1;
    }
    let mut bn = x.clone();
    batch_norm(&mut bn, &params).unwrap();
    for c in 0..4 {
        for i in 0..9 {
            let v = x.data[c * 9 + i];
            let want = params[c] * (v - params[8 + c]) / (params[12 + c] + BN_EPSILON).sqrt() + params[4 + c];
            assert!((bn.data[c * 9 + i] - want).abs() < 1e-5);
        }
    }

    let v = random_vec(&mut rng, 4);
    let w = random_vec(&mut rng, 12);
    let b = random_vec(&mut rng, 3);
    let y = dense(&v, &w, Some(&b)).unwrap();
    for o in 0..3 {
        let want: f32 = (0..4).map(|i| w[o * 4 + i] * v[i]).sum::<f32>() + b[o];
        assert!((y[o] - want).abs() < 1e-5);
    }

    // SE with r = 2 against a loop-by-loop computation.
    let reduce = random_vec(&mut rng, 8);
    let expand = random_vec(&mut rng, 8);
    let got = se_forward(&x, &reduce, &expand).unwrap();
    let pooled: Vec<f64> = (0..4).map(|c| x.plane(c).iter().map(|&v| v as f64).sum::<f64>() / 9.0).collect();
    let hidden: Vec<f64> = (0..2)
        .map(|j| (0..4).map(|c| reduce[j * 4 + c] as f64 * pooled[c]).sum::<f64>().max(0.0))
        .collect();
    for c in 0..4 {
        let z: f64 = (0..2).map(|j| expand[c * 2 + j] as f64 * hidden[j]).sum();
        let gate = 1.0 / (1.0 + (-z).exp());
        for i in 0..9 {
            let want = x.data[c * 9 + i] as f64 * gate;
            assert!((got.data[c * 9 + i] as f64 - want).abs() < 1e-5);
        }
    }
    assert!(se_forward(&x, &reduce[..6], &expand).is_err());
}

#[test]
fn se_analytic_cases_and_reference_at_ratio_16() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = random_map(&mut rng, 16, 9);
    let reduce = random_vec(&mut rng, 16);

    // Zero excitation weights give gates of exactly one half.
    let half = se_forward(&x, &reduce, &[0.0; 16]).unwrap();
    for (h, v) in half.data.iter().zip(&x.data) {
        assert_eq!(*h, 0.5 * v);
    }

    // Saturated gates are exactly one: the identity map.
    let ones = [1.0; 16];
    let big = [1.0e4; 16];
    let x_pos = FeatureMap::new(16, 9, x.data.iter().map(|v| v.abs() + 0.5).collect());
    assert_eq!(se_forward(&x_pos, &ones, &big).unwrap(), x_pos);

    let expand = random_vec(&mut rng, 16);
    let got = se_forward(&x, &reduce, &expand).unwrap();
    let pooled: Vec<f64> = (0..16).map(|c| x.plane(c).iter().map(|&v| v as f64).sum::<f64>() / 81.0).collect();
    let hidden = (0..16).map(|c| reduce[c] as f64 * pooled[c]).sum::<f64>().max(0.0);
    for c in 0..16 {
        let gate = 1.0 / (1.0 + (-(expand[c] as f64) * hidden).exp());
        for i in 0..81 {
            let want = x.data[c * 81 + i] as f64 * gate;
            assert!((got.data[c * 81 + i] as f64 - want).abs() <= 1e-6 * want.abs().max(1.0));
        }
    }
}

#[test]
fn names_parse_and_round_trip() {
    let d = NetworkDescriptor::parse("se.16.384.64", 19).unwrap();
    assert_eq!((d.family, d.blocks, d.block_planes, d.trunk_planes), (Family::MobileSe, 16, 384, 64));
    assert_eq!(d.name(), "se.16.384.64");
    let r: NetworkDescriptor = "residual.6.128".parse().unwrap();
    assert_eq!((r.family, r.blocks, r.trunk_planes), (Family::Residual, 6, 128));
    assert_eq!(r.to_string(), "residual.6.128");
    for bad in ["se.16.384", "conv.1.2.3", "se.0.10.10", "residual.a.3", ""] {
        assert!(NetworkDescriptor::parse(bad, 19).is_err(), "{bad}");
    }
    assert!(NetworkDescriptor::parse("se.2.12.4", 8).is_err());
}

#[test]
fn param_count_matches_layer_shapes() {
    // Hand count for se.1.12.2 on 9x9 (SE width max(2/16, 1) = 1).
    let d = NetworkDescriptor::mobile_se(1, 12, 2, 9);
    let stem = 2 * 21 * 9 + 4 * 2;
    let block = 12 * 2 + 4 * 12 + 12 * 9 + 4 * 12 + 2 * 12 + 4 * 2 + 2 + 2;
    let heads = 2 + (2 + 1) + (50 * 2 + 50) + (50 + 1);
    assert_eq!(param_count(&d), stem + block + heads);
    assert_eq!(build(&d, 0).unwrap().num_params(), param_count(&d));
    let breakdown: usize = d.param_breakdown().iter().map(|(_, n)| n).sum();
    assert_eq!(breakdown, param_count(&d));
}

#[test]
fn param_count_grows_with_every_block() {
    for w in [16, 64, 256] {
        let mut prev = 0;
        for blocks in 1..=12 {
            let n = param_count(&NetworkDescriptor::mobile_se_default(blocks, w, 19));
            assert!(n > prev);
            prev = n;
        }
    }
    let per_block = |d: NetworkDescriptor| {
        let mut d2 = d;
        d2.blocks += 1;
        param_count(&d2) - param_count(&d)
    };
    assert_eq!(per_block(NetworkDescriptor::residual(3, 32, 9)), 2 * (32 * 32 * 9 + 4 * 32));
}

#[test]
fn zero_network_is_neutral() {
    let d = NetworkDescriptor::mobile_se(2, 24, 8, 9);
    let net = Network::zeros(&d).unwrap();
    for board in random_game(9, 4, 30) {
        let out = net.forward_one(&encode(&board)).unwrap();
        assert_eq!(out.policy_logits.len(), 82);
        assert!(out.policy_logits.iter().all(|&l| l == 0.0));
        assert_eq!(out.value, 0.5);
    }
}

#[test]
fn outputs_are_finite_and_batching_is_irrelevant() {
    for d in [
        NetworkDescriptor::mobile_se(3, 24, 8, 9),
        NetworkDescriptor::mobile(2, 16, 8, 7),
        NetworkDescriptor::residual(2, 8, 9),
    ] {
        let net = build(&d, 11).unwrap();
        let boards = random_game(d.board_size, 5, 20);
        let inputs: Vec<_> = boards.iter().map(encode).collect();
        let batched = net.forward(&inputs).unwrap();
        for (x, y) in inputs.iter().zip(&batched) {
            assert_eq!(&net.forward_one(x).unwrap(), y);
            assert!(y.value > 0.0 && y.value < 1.0);
            assert!(y.policy_logits.iter().all(|v| v.is_finite()));
        }
    }
}

#[test]
fn value_stays_inside_unit_interval_when_saturated() {
    let d = NetworkDescriptor::residual(1, 4, 5);
    let mut net = Network::zeros(&d).unwrap();
    net.tensor_mut("value.fc2.bias").unwrap().data[0] = 1.0e6;
    let v = net.forward_one(&encode(&Board::new(5, 0.5).unwrap())).unwrap().value;
    assert!(v < 1.0 && v > 0.99);
}

#[test]
fn pass_unit_can_be_omitted() {
    let mut d = NetworkDescriptor::mobile_se(1, 12, 4, 9);
    d.pass_logit = false;
    let net = build(&d, 3).unwrap();
    let out = net.forward_one(&encode(&Board::new(9, 7.5).unwrap())).unwrap();
    assert_eq!(out.policy_logits[81], NO_PASS_LOGIT);
    let mut buf = Vec::new();
    save_weights(&net, &mut buf).unwrap();
    assert_eq!(load_weights(&buf[..]).unwrap(), net);
}

/// Averages every 3x3 kernel over the eight board symmetries so the network
/// commutes with them.
fn symmetrize(net: &mut Network) {
    let names: Vec<String> = net.tensors().iter().map(|t| t.name.clone()).collect();
    for name in names {
        let t = net.tensor_mut(&name).unwrap();
        if t.dims.len() != 4 || t.dims[2] != 3 {
            continue;
        }
        for kern in t.data.chunks_exact_mut(9) {
            let orig: Vec<f32> = kern.to_vec();
            for r in 0..3 {
                for c in 0..3 {
                    let sum: f32 = Symmetry::all()
                        .map(|s| {
                            let (rr, cc) = s.apply_rc(r, c, 3);
                            orig[rr * 3 + cc]
                        })
                        .sum();
                    kern[r * 3 + c] = sum / 8.0;
                }
            }
        }
    }
}

#[test]
fn symmetric_network_is_equivariant() {
    for d in [NetworkDescriptor::mobile_se(2, 24, 8, 9), NetworkDescriptor::residual(2, 8, 7)] {
        let n = d.board_size;
        let mut net = build(&d, 21).unwrap();
        symmetrize(&mut net);
        for board in random_game(n, 9, 25).iter().step_by(6) {
            let x = encode(board);
            let base = net.forward_one(&x).unwrap();
            for s in Symmetry::all() {
                let out = net.forward_one(&x.transform(s)).unwrap();
                assert!((out.value - base.value).abs() < 1e-5);
                for idx in 0..=n * n {
                    let moved = s.apply_policy_index(idx, n);
                    let (a, b) = (out.policy_logits[moved], base.policy_logits[idx]);
                    assert!((a - b).abs() < 1e-5 * (1.0 + b.abs()), "sym {s:?} idx {idx}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn weights_round_trip_and_reject_corruption() {
    let d = NetworkDescriptor::mobile_se(2, 12, 4, 9);
    let net = build(&d, 5).unwrap();
    let mut buf = Vec::new();
    save_weights(&net, &mut buf).unwrap();
    assert_eq!(load_weights(&buf[..]).unwrap(), net);

    let mut bad = buf.clone();
    bad[0] = b'X';
    assert_eq!(load_weights(&bad[..]), Err(NnError::BadMagic));

    let mut bad = buf.clone();
    bad[4] = 9;
    assert!(matches!(load_weights(&bad[..]), Err(NnError::VersionMismatch { found: 9, .. })));

    let mut bad = buf.clone();
    bad[36] ^= 1;
    assert!(matches!(load_weights(&bad[..]), Err(NnError::PlaneOrderMismatch { .. })));

    // Cutting inside the last layer reports that layer.
    let last = d.layer_specs().len() - 1;
    let cut = &buf[..buf.len() - 2];
    assert!(matches!(load_weights(cut), Err(NnError::LayerMismatch { layer, .. }) if layer == last));

    // A descriptor change shifts every later shape.
    let other = build(&NetworkDescriptor::mobile_se(2, 12, 8, 9), 5).unwrap();
    let mut buf2 = Vec::new();
    save_weights(&other, &mut buf2).unwrap();
    buf2[16..20].copy_from_slice(&4u32.to_le_bytes());
    assert!(matches!(load_weights(&buf2[..]), Err(NnError::LayerMismatch { layer: 0, .. })));
}

#[test]
fn bench_runs_at_least_one_batch() {
    let net = build(&NetworkDescriptor::mobile_se(1, 12, 4, 9), 0).unwrap();
    let r = bench_forward(&net, 4, std::time::Duration::ZERO).unwrap();
    assert_eq!((r.batches, r.batch_size), (1, 4));
    assert!(r.batches_per_second > 0.0);
}
