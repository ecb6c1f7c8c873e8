//! Model serialization. Parameters are always stored as little-endian f64
//! regardless of the in-memory precision.

use std::path::Path;

use super::{Act, Arch, CornerCodebook, Dense, NetError, Network, Scalar, Tensor};
use crate::ioutil::{self, ByteReader};

const MAGIC: &[u8; 4] = b"RDFM";
const VERSION: u16 = 1;

fn act_byte(act: Act) -> u8 {
    match act {
        Act::Relu => 0,
        Act::Sigmoid => 1,
        Act::Softmax => 2,
    }
}

fn act_from(byte: u8) -> Result<Act, NetError> {
    match byte {
        0 => Ok(Act::Relu),
        1 => Ok(Act::Sigmoid),
        2 => Ok(Act::Softmax),
        other => Err(NetError::Format(format!("bad activation byte {other}"))),
    }
}

impl<T: Scalar> Network<T> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.arch.n as u8);
        out.extend_from_slice(&(self.arch.index_bits as u16).to_le_bytes());
        out.extend_from_slice(&(self.arch.k_bits as u16).to_le_bytes());
        out.extend_from_slice(&(self.arch.l_bits as u16).to_le_bytes());
        let layers: Vec<&Dense<T>> = self.enc.iter().chain(&self.dec).collect();
        out.extend_from_slice(&(layers.len() as u16).to_le_bytes());
        for l in &layers {
            out.extend_from_slice(&(l.in_dim() as u32).to_le_bytes());
            out.extend_from_slice(&(l.out_dim() as u32).to_le_bytes());
            out.push(act_byte(l.act));
        }
        for l in &layers {
            for v in &l.w.data {
                out.extend_from_slice(&v.to_f64().to_le_bytes());
            }
            for v in &l.b {
                out.extend_from_slice(&v.to_f64().to_le_bytes());
            }
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), NetError> {
        ioutil::atomic_write(path, &self.to_bytes())?;
        Ok(())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NetError> {
        let fmt = |e: std::io::Error| NetError::Format(e.to_string());
        let mut r = ByteReader::new(bytes);
        if r.take(4).map_err(fmt)? != MAGIC {
            return Err(NetError::Format("bad magic".into()));
        }
        let version = r.u16().map_err(fmt)?;
        if version != VERSION {
            return Err(NetError::Format(format!("unsupported version {version}")));
        }
        let n = r.u8().map_err(fmt)? as usize;
        let index_bits = r.u16().map_err(fmt)? as usize;
        let k_bits = r.u16().map_err(fmt)? as usize;
        let l_bits = r.u16().map_err(fmt)? as usize;
        let arch = Arch::new(n, index_bits, k_bits, l_bits)?;
        let layer_count = r.u16().map_err(fmt)? as usize;
        let expected = arch.layer_dims();
        if layer_count != expected.len() {
            return Err(NetError::Format(format!(
                "expected {} layers, file has {layer_count}",
                expected.len()
            )));
        }
        let mut dims = Vec::with_capacity(layer_count);
        for &(want_in, want_out, want_act) in &expected {
            let inw = r.u32().map_err(fmt)? as usize;
            let outw = r.u32().map_err(fmt)? as usize;
            let act = act_from(r.u8().map_err(fmt)?)?;
            if inw != want_in || outw != want_out || act != want_act {
                return Err(NetError::Format(format!(
                    "layer {inw}x{outw} does not match the architecture header"
                )));
            }
            dims.push((inw, outw, act));
        }
        let mut layers = Vec::with_capacity(layer_count);
        for (inw, outw, act) in dims {
            let mut data = Vec::with_capacity(inw * outw);
            for _ in 0..inw * outw {
                data.push(T::from_f64(r.f64().map_err(fmt)?));
            }
            let mut b = Vec::with_capacity(outw);
            for _ in 0..outw {
                b.push(T::from_f64(r.f64().map_err(fmt)?));
            }
            layers.push(Dense {
                w: Tensor {
                    rows: inw,
                    cols: outw,
                    data,
                },
                b,
                act,
            });
        }
        if !r.done() {
            return Err(NetError::Format("trailing bytes".into()));
        }
        let dec = layers.split_off(Arch::ENC_LAYERS);
        Ok(Network {
            arch,
            enc: layers,
            dec,
            codebook: CornerCodebook::new(arch.index_bits),
        })
    }
}

/// Loads a model saved by [`Network::save`].
pub fn load_model<T: Scalar>(path: &Path) -> Result<Network<T>, NetError> {
    Network::from_bytes(&ioutil::read_all(path)?)
}
