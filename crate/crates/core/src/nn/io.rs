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

//! Binary weight files, shared with the Python trainer.
//!
//! All integers are little-endian.
//!
//! ```text
//! magic        b"GPGO"
//! version      u32 (= 1)
//! family       u32 (0 MobileSE, 1 Mobile, 2 Residual)
//! blocks       u32
//! trunk        u32
//! block_planes u32
//! se_ratio     u32
//! input_planes u32
//! board_size   u32
//! plane_hash   u64   hash of the input plane order
//! layers       u32
//! per layer:   name_len u32, name (utf-8), rank u32, dims u32 x rank,
//!              data f32 x prod(dims)
//! ```
//!
//! Layers appear in [`NetworkDescriptor::layer_specs`] order. A network
//! without a pass unit simply omits the two `policy.pass.*` layers.

use std::io::{self, Read, Write};

use super::{Family, Network, NetworkDescriptor, NnError, Tensor};
use crate::encoding::plane_order_hash;

pub const MAGIC: &[u8; 4] = b"GPGO";
pub const FORMAT_VERSION: u32 = 1;

fn u32_of(x: usize) -> io::Result<u32> {
    u32::try_from(x).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "value exceeds u32"))
}

pub fn save_weights<W: Write>(net: &Network, mut out: W) -> io::Result<()> {
    let d = net.descriptor();
    out.write_all(MAGIC)?;
    for v in [
        FORMAT_VERSION as usize,
        d.family.code() as usize,
        d.blocks,
        d.trunk_planes,
        d.block_planes,
        d.se_ratio,
        d.input_planes,
        d.board_size,
    ] {
        out.write_all(&u32_of(v)?.to_le_bytes())?;
    }
    out.write_all(&plane_order_hash().to_le_bytes())?;
    out.write_all(&u32_of(net.tensors().len())?.to_le_bytes())?;
    for t in net.tensors() {
        out.write_all(&u32_of(t.name.len())?.to_le_bytes())?;
        out.write_all(t.name.as_bytes())?;
        out.write_all(&u32_of(t.dims.len())?.to_le_bytes())?;
        for &dim in &t.dims {
            out.write_all(&u32_of(dim)?.to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(4 * t.data.len());
        for v in &t.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()
}

struct Reader<R> {
    inner: R,
    layer: Option<usize>,
}

impl<R: Read> Reader<R> {
    fn fail(&self, msg: &str) -> NnError {
        match self.layer {
            Some(layer) => NnError::LayerMismatch { layer, msg: msg.to_string() },
            None => NnError::ShapeMismatch(format!("header: {msg}")),
        }
    }

    fn bytes(&mut self, n: usize) -> Result<Vec<u8>, NnError> {
        let mut buf = Vec::new();
        let got = (&mut self.inner).take(n as u64).read_to_end(&mut buf).map_err(|e| self.fail(&e.to_string()))?;
        if got != n {
            return Err(self.fail("truncated file"));
        }
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32, NnError> {
        let b = self.bytes(4)?;
        Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, NnError> {
        let b = self.bytes(8)?;
        Ok(u64::from_le_bytes(b.try_into().expect("8 bytes")))
    }
}

/// Reads a weight file, validating magic, version, plane order, and every
/// layer's name and shape.
pub fn load_weights<R: Read>(input: R) -> Result<Network, NnError> {
    let mut r = Reader { inner: input, layer: None };
    let magic = r.bytes(4).map_err(|_| NnError::BadMagic)?;
    if magic != MAGIC {
        return Err(NnError::BadMagic);
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(NnError::VersionMismatch { found: version, expected: FORMAT_VERSION });
    }
    let mut fields = [0usize; 7];
    for f in &mut fields {
        *f = r.u32()? as usize;
    }
    let [family, blocks, trunk_planes, block_planes, se_ratio, input_planes, board_size] = fields;
    let family = Family::from_code(family as u32)
        .ok_or_else(|| NnError::InvalidDescriptor(format!("unknown family code {family}")))?;
    let hash = r.u64()?;
    if hash != plane_order_hash() {
        return Err(NnError::PlaneOrderMismatch { found: hash, expected: plane_order_hash() });
    }
    let layers = r.u32()? as usize;
    let mut desc = NetworkDescriptor {
        family,
        blocks,
        trunk_planes,
        block_planes,
        se_ratio,
        input_planes,
        board_size,
        pass_logit: true,
    };
    desc.validate()?;
    if layers != desc.layer_specs().len() {
        desc.pass_logit = false;
    }
    let specs = desc.layer_specs();
    if layers != specs.len() {
        return Err(NnError::ShapeMismatch(format!("{layers} layers do not fit {}", desc.name())));
    }

    let mut tensors = Vec::with_capacity(specs.len());
    for (k, spec) in specs.iter().enumerate() {
        r.layer = Some(k);
        let name_len = r.u32()? as usize;
        if name_len > 256 {
            return Err(r.fail("layer name too long"));
        }
        let name = String::from_utf8(r.bytes(name_len)?).map_err(|_| r.fail("layer name is not utf-8"))?;
        if name != spec.name {
            return Err(r.fail(&format!("expected layer {}, found {name}", spec.name)));
        }
        let rank = r.u32()? as usize;
        if rank != spec.dims.len() {
            return Err(r.fail(&format!("{name}: rank {rank}, expected {}", spec.dims.len())));
        }
        let mut dims = Vec::with_capacity(rank);
        for _ in 0..rank {
            dims.push(r.u32()? as usize);
        }
        if dims != spec.dims {
            return Err(r.fail(&format!("{name}: dims {dims:?}, expected {:?}", spec.dims)));
        }
        let raw = r.bytes(4 * spec.len())?;
        let data = raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
        tensors.push(Tensor { name, dims, data });
    }
    Network::from_tensors(desc, tensors)
}
