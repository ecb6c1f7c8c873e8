//! From-scratch dense network engine for the synthesis autoencoder.
//!
//! The architecture is fixed by the experiment design: the encoder sees the
//! one-hot channel input concatenated with the binary common-randomness
//! word, passes through three ReLU layers of width `4(2^n + nr0)`, and emits
//! an `nR`-dimensional sigmoid latent that a fixed-codebook vector quantizer
//! snaps to a hypercube corner (the transmitted index). The decoder sees the
//! common randomness, the quantized latent, and the binary local-randomness
//! word, passes through five ReLU layers of width `6(2^n + nr0 + nrl)`, and
//! produces a softmax over all `2^n` outputs. With `nr0 = 0` the
//! common-randomness input is removed entirely.
//!
//! Backpropagation through the quantizer uses the straight-through rule: the
//! gradient w.r.t. the latent is copied verbatim from the gradient w.r.t.
//! the quantized output, and the codebook itself receives no gradient.

pub mod gemm;
mod io;
mod optim;
mod scalar;
mod vq;

pub use io::load_model;
pub use optim::{adam_step, adam_update_slice, AdamState, PlateauState};
pub use scalar::Scalar;
pub use vq::{vq_quantize, CornerCodebook};

use thiserror::Error;

use crate::datagen::SampleRecord;
use crate::exec;
use crate::seeds::{self, label};
use gemm::{matmul_acc, transpose};

#[derive(Debug, Error)]
pub enum NetError {
    #[error("invalid architecture: {0}")]
    BadArch(String),
    #[error("non-finite activation in {layer}")]
    NonFinite { layer: String },
    #[error("input record out of range for the architecture: {0}")]
    InputOutOfRange(String),
    #[error("empty batch")]
    EmptyBatch,
    #[error("malformed model file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Batch-major value buffer, shape `rows x cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::ZERO; rows * cols],
        }
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn all_finite(&self) -> bool {
        self.data.iter().fold(true, |acc, v| acc & v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Act {
    Relu,
    Sigmoid,
    Softmax,
}

/// Fully connected layer; `w` has shape `in_dim x out_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    pub w: Tensor<T>,
    pub b: Vec<T>,
    pub act: Act,
}

impl<T: Scalar> Dense<T> {
    pub fn in_dim(&self) -> usize {
        self.w.rows
    }

    pub fn out_dim(&self) -> usize {
        self.w.cols
    }
}

/// Network dimensions. `index_bits` is the width of the quantized latent
/// (the transmitted index), normally `n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arch {
    pub n: usize,
    pub index_bits: usize,
    pub k_bits: usize,
    pub l_bits: usize,
}

impl Arch {
    pub fn new(
        n: usize,
        index_bits: usize,
        k_bits: usize,
        l_bits: usize,
    ) -> Result<Self, NetError> {
        if n == 0 || n > 16 {
            return Err(NetError::BadArch(format!("blocklength {n} out of range")));
        }
        if index_bits == 0 || index_bits > 30 {
            return Err(NetError::BadArch(format!(
                "index width {index_bits} out of range"
            )));
        }
        if k_bits > 30 || l_bits > 30 {
            return Err(NetError::BadArch("randomness width out of range".into()));
        }
        Ok(Self {
            n,
            index_bits,
            k_bits,
            l_bits,
        })
    }

    pub fn x_width(&self) -> usize {
        1 << self.n
    }

    pub fn enc_in_width(&self) -> usize {
        self.x_width() + self.k_bits
    }

    pub fn enc_hidden(&self) -> usize {
        4 * (self.x_width() + self.k_bits)
    }

    pub fn dec_in_width(&self) -> usize {
        self.k_bits + self.index_bits + self.l_bits
    }

    pub fn dec_hidden(&self) -> usize {
        6 * (self.x_width() + self.k_bits + self.l_bits)
    }

    /// `(in, out, act)` for every dense layer, encoder first.
    pub fn layer_dims(&self) -> Vec<(usize, usize, Act)> {
        let h = self.enc_hidden();
        let d = self.dec_hidden();
        vec![
            (self.enc_in_width(), h, Act::Relu),
            (h, h, Act::Relu),
            (h, h, Act::Relu),
            (h, self.index_bits, Act::Sigmoid),
            (self.dec_in_width(), d, Act::Relu),
            (d, d, Act::Relu),
            (d, d, Act::Relu),
            (d, d, Act::Relu),
            (d, d, Act::Relu),
            (d, self.x_width(), Act::Softmax),
        ]
    }

    const ENC_LAYERS: usize = 4;
}

/// Whether the quantizer actually quantizes. `Identity` exists for gradient
/// verification: it makes the whole network differentiable while sharing the
/// exact backward path of the straight-through estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VqMode {
    Quantize,
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    pub arch: Arch,
    pub enc: Vec<Dense<T>>,
    pub dec: Vec<Dense<T>>,
    pub codebook: CornerCodebook,
}

/// Builds the standard autoencoder with `index_bits = n - 1` and seeded
/// fan-based uniform weights (biases zero).
pub fn build_rdfc_ae<T: Scalar>(
    n: usize,
    k_bits: usize,
    l_bits: usize,
    seed: u64,
) -> Result<Network<T>, NetError> {
    if n < 2 {
        return Err(NetError::BadArch(format!(
            "blocklength {n} < 2 leaves no index width"
        )));
    }
    Network::new(Arch::new(n, n - 1, k_bits, l_bits)?, seed)
}

impl<T: Scalar> Network<T> {
    /// Initializes all layers from the derived init stream: weights uniform
    /// in `[-lim, lim]` with `lim = sqrt(6 / (fan_in + fan_out))`, biases
    /// zero. The stream is consumed in fixed layer order, so equal seeds
    /// give bit-identical parameters.
    pub fn new(arch: Arch, seed: u64) -> Result<Self, NetError> {
        use rand::Rng;
        let mut rng = seeds::stream(seed, label::NET_INIT, 0);
        let mut make = |dims: &[(usize, usize, Act)]| -> Vec<Dense<T>> {
            dims.iter()
                .map(|&(inw, outw, act)| {
                    let lim = (6.0 / (inw + outw) as f64).sqrt();
                    let data = (0..inw * outw)
                        .map(|_| T::from_f64(rng.random_range(-lim..lim)))
                        .collect();
                    Dense {
                        w: Tensor {
                            rows: inw,
                            cols: outw,
                            data,
                        },
                        b: vec![T::ZERO; outw],
                        act,
                    }
                })
                .collect()
        };
        let dims = arch.layer_dims();
        let enc = make(&dims[..Arch::ENC_LAYERS]);
        let dec = make(&dims[Arch::ENC_LAYERS..]);
        Ok(Self {
            arch,
            enc,
            dec,
            codebook: CornerCodebook::new(arch.index_bits),
        })
    }

    pub fn param_count(&self) -> usize {
        self.enc
            .iter()
            .chain(&self.dec)
            .map(|l| l.w.data.len() + l.b.len())
            .sum()
    }

    fn fill_bits(row: &mut [T], value: u64, bits: usize) {
        for c in 0..bits {
            if value >> (bits - 1 - c) & 1 == 1 {
                row[c] = T::ONE;
            }
        }
    }

    /// Forward pass over a batch of records (`y` is ignored). Returns the
    /// cache needed by [`Network::backward`].
    pub fn forward(&self, records: &[SampleRecord]) -> Result<Forward<T>, NetError> {
        self.forward_with_mode(records, VqMode::Quantize)
    }

    pub fn forward_with_mode(
        &self,
        records: &[SampleRecord],
        mode: VqMode,
    ) -> Result<Forward<T>, NetError> {
        if records.is_empty() {
            return Err(NetError::EmptyBatch);
        }
        let arch = &self.arch;
        let rows = records.len();
        let x_width = arch.x_width() as u64;
        let mut enc_in = Tensor::zeros(rows, arch.enc_in_width());
        let mut dec_in = Tensor::zeros(rows, arch.dec_in_width());
        for (r, rec) in records.iter().enumerate() {
            if u64::from(rec.x) >= x_width
                || rec.k >> arch.k_bits != 0
                || rec.l >> arch.l_bits != 0
            {
                return Err(NetError::InputOutOfRange(format!(
                    "x={} k={} l={}",
                    rec.x, rec.k, rec.l
                )));
            }
            let er = enc_in.row_mut(r);
            er[rec.x as usize] = T::ONE;
            Self::fill_bits(&mut er[arch.x_width()..], rec.k, arch.k_bits);
            let dr = dec_in.row_mut(r);
            Self::fill_bits(&mut dr[..arch.k_bits], rec.k, arch.k_bits);
            Self::fill_bits(&mut dr[arch.k_bits + arch.index_bits..], rec.l, arch.l_bits);
        }

        let mut enc_acts = Vec::with_capacity(self.enc.len());
        let mut cur = &enc_in;
        for (li, layer) in self.enc.iter().enumerate() {
            enc_acts.push(run_layer(cur, layer, || format!("encoder layer {li}"))?);
            cur = enc_acts.last().unwrap();
        }
        let latent = enc_acts.last().unwrap();

        let mut quantized = Tensor::zeros(rows, arch.index_bits);
        let mut indices = Vec::with_capacity(rows);
        for r in 0..rows {
            match mode {
                VqMode::Quantize => {
                    let idx = self
                        .codebook
                        .quantize_into(latent.row(r), quantized.row_mut(r));
                    indices.push(idx);
                }
                VqMode::Identity => {
                    quantized.row_mut(r).copy_from_slice(latent.row(r));
                    let mut probe = vec![T::ZERO; arch.index_bits];
                    indices.push(self.codebook.quantize_into(latent.row(r), &mut probe));
                }
            }
            dec_in.row_mut(r)[arch.k_bits..arch.k_bits + arch.index_bits]
                .copy_from_slice(quantized.row(r));
        }

        let mut dec_acts = Vec::with_capacity(self.dec.len());
        let mut cur = &dec_in;
        for (li, layer) in self.dec.iter().enumerate() {
            dec_acts.push(run_layer(cur, layer, || format!("decoder layer {li}"))?);
            cur = dec_acts.last().unwrap();
        }

        Ok(Forward {
            enc_in,
            enc_acts,
            quantized,
            indices,
            dec_in,
            dec_acts,
        })
    }

    /// Gradients of the mean batch loss w.r.t. every trainable parameter.
    /// `scale` is `1 / total_batch_rows`, passed explicitly so a batch can
    /// be processed in chunks whose gradients sum to the full-batch
    /// gradient.
    pub fn backward(&self, fwd: &Forward<T>, targets: &[u32], scale: f64) -> Grads<T> {
        let rows = fwd.dec_in.rows;
        assert_eq!(targets.len(), rows);
        let mut grads = Grads::zeros_like(self);
        let yhat = fwd.output();
        let s = T::from_f64(scale);

        // Softmax + cross-entropy fused: dL/dz = (yhat - onehot) * scale.
        let mut delta = Tensor::zeros(rows, yhat.cols);
        for r in 0..rows {
            let dr = delta.row_mut(r);
            dr.copy_from_slice(yhat.row(r));
            let t = targets[r] as usize;
            dr[t] = dr[t] - T::ONE;
            for v in dr.iter_mut() {
                *v = *v * s;
            }
        }

        let dec_hidden: Vec<&Tensor<T>> = fwd.dec_acts[..fwd.dec_acts.len() - 1].iter().collect();
        let delta_dec_in =
            backprop_stack(&self.dec, &dec_hidden, &fwd.dec_in, delta, &mut grads.dec);

        // Straight-through: the latent gradient is the quantized-output
        // gradient, verbatim; then the sigmoid's local derivative applies.
        let arch = &self.arch;
        let latent = fwd.latent();
        let mut delta_latent_z = Tensor::zeros(rows, arch.index_bits);
        for r in 0..rows {
            let src = &delta_dec_in.row(r)[arch.k_bits..arch.k_bits + arch.index_bits];
            let lat = latent.row(r);
            let dst = delta_latent_z.row_mut(r);
            for c in 0..arch.index_bits {
                dst[c] = src[c] * lat[c] * (T::ONE - lat[c]);
            }
        }

        let enc_hidden: Vec<&Tensor<T>> = fwd.enc_acts[..fwd.enc_acts.len() - 1].iter().collect();
        let _ = backprop_stack(
            &self.enc,
            &enc_hidden,
            &fwd.enc_in,
            delta_latent_z,
            &mut grads.enc,
        );
        grads
    }

    /// Hard decisions for a batch: argmax of each output row, computed in
    /// fixed-size chunks (parallel, order-preserving).
    pub fn predict(&self, records: &[SampleRecord]) -> Result<Vec<u32>, NetError> {
        let outs = exec::map_chunks(
            records.len(),
            exec::CHUNK_ROWS,
            |start, len| -> Result<Vec<u32>, NetError> {
                let fwd = self.forward(&records[start..start + len])?;
                let yhat = fwd.output();
                Ok((0..len)
                    .map(|r| argmax_decode(yhat.row(r)) as u32)
                    .collect())
            },
        );
        let mut all = Vec::with_capacity(records.len());
        for o in outs {
            all.extend(o?);
        }
        Ok(all)
    }
}

/// Cached activations from one forward pass.
#[derive(Debug, Clone)]
pub struct Forward<T> {
    pub enc_in: Tensor<T>,
    pub enc_acts: Vec<Tensor<T>>,
    pub quantized: Tensor<T>,
    /// Transmitted index per row (nearest codebook point, in both modes).
    pub indices: Vec<u64>,
    pub dec_in: Tensor<T>,
    pub dec_acts: Vec<Tensor<T>>,
}

impl<T: Scalar> Forward<T> {
    pub fn output(&self) -> &Tensor<T> {
        self.dec_acts.last().expect("decoder has layers")
    }

    /// Encoder latent before quantization.
    pub fn latent(&self) -> &Tensor<T> {
        self.enc_acts.last().expect("encoder has layers")
    }
}

/// Per-layer gradient buffers, shaped like the network parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads<T> {
    pub dw: Vec<T>,
    pub db: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grads<T> {
    pub enc: Vec<LayerGrads<T>>,
    pub dec: Vec<LayerGrads<T>>,
}

impl<T: Scalar> Grads<T> {
    pub fn zeros_like(net: &Network<T>) -> Self {
        let make = |layers: &[Dense<T>]| {
            layers
                .iter()
                .map(|l| LayerGrads {
                    dw: vec![T::ZERO; l.w.data.len()],
                    db: vec![T::ZERO; l.b.len()],
                })
                .collect()
        };
        Self {
            enc: make(&net.enc),
            dec: make(&net.dec),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        let add = |a: &mut Vec<LayerGrads<T>>, b: &[LayerGrads<T>]| {
            for (la, lb) in a.iter_mut().zip(b) {
                for (x, y) in la.dw.iter_mut().zip(&lb.dw) {
                    *x += *y;
                }
                for (x, y) in la.db.iter_mut().zip(&lb.db) {
                    *x += *y;
                }
            }
        };
        add(&mut self.enc, &other.enc);
        add(&mut self.dec, &other.dec);
    }

    /// Largest absolute entry, for diagnostics and tests.
    pub fn max_abs(&self) -> f64 {
        self.enc
            .iter()
            .chain(&self.dec)
            .flat_map(|l| l.dw.iter().chain(&l.db))
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

fn run_layer<T: Scalar>(
    input: &Tensor<T>,
    layer: &Dense<T>,
    name: impl Fn() -> String,
) -> Result<Tensor<T>, NetError> {
    assert_eq!(input.cols, layer.in_dim());
    let rows = input.rows;
    let out = layer.out_dim();
    let mut z = Tensor::zeros(rows, out);
    matmul_acc(&mut z.data, &input.data, &layer.w.data, rows, input.cols, out);
    for r in 0..rows {
        let zr = z.row_mut(r);
        for (v, b) in zr.iter_mut().zip(&layer.b) {
            *v += *b;
        }
    }
    if !z.all_finite() {
        return Err(NetError::NonFinite { layer: name() });
    }
    match layer.act {
        Act::Relu => {
            for v in z.data.iter_mut() {
                *v = v.maximum(T::ZERO);
            }
        }
        Act::Sigmoid => {
            for v in z.data.iter_mut() {
                *v = T::ONE / (T::ONE + (-*v).exp());
            }
        }
        Act::Softmax => {
            for r in 0..rows {
                let zr = z.row_mut(r);
                let mut m = zr[0];
                for v in zr.iter() {
                    m = m.maximum(*v);
                }
                let mut sum = T::ZERO;
                for v in zr.iter_mut() {
                    *v = (*v - m).exp();
                    sum += *v;
                }
                for v in zr.iter_mut() {
                    *v = *v / sum;
                }
            }
        }
    }
    Ok(z)
}

/// Walks a dense stack backwards. `delta_z` is the loss gradient w.r.t. the
/// pre-activation of the last layer; `hidden_acts` are the post-activation
/// outputs of all layers but the last. Returns the gradient w.r.t. the stack
/// input (post-activation space of whatever produced it).
fn backprop_stack<T: Scalar>(
    layers: &[Dense<T>],
    hidden_acts: &[&Tensor<T>],
    input: &Tensor<T>,
    mut delta_z: Tensor<T>,
    grads: &mut [LayerGrads<T>],
) -> Tensor<T> {
    debug_assert_eq!(hidden_acts.len(), layers.len() - 1);
    let rows = delta_z.rows;
    for i in (0..layers.len()).rev() {
        let layer = &layers[i];
        let prev: &Tensor<T> = if i == 0 { input } else { hidden_acts[i - 1] };
        // dw += prev^T . delta_z
        let prev_t = transpose(&prev.data, rows, prev.cols);
        matmul_acc(
            &mut grads[i].dw,
            &prev_t,
            &delta_z.data,
            prev.cols,
            rows,
            layer.out_dim(),
        );
        for r in 0..rows {
            let dr = delta_z.row(r);
            for (db, d) in grads[i].db.iter_mut().zip(dr) {
                *db += *d;
            }
        }
        // delta w.r.t. the layer input (post-activation space).
        let w_t = transpose(&layer.w.data, layer.in_dim(), layer.out_dim());
        let mut dprev = Tensor::zeros(rows, layer.in_dim());
        matmul_acc(
            &mut dprev.data,
            &delta_z.data,
            &w_t,
            rows,
            layer.out_dim(),
            layer.in_dim(),
        );
        if i > 0 {
            let act_vals = hidden_acts[i - 1];
            match layers[i - 1].act {
                Act::Relu => {
                    for (d, a) in dprev.data.iter_mut().zip(&act_vals.data) {
                        if !(*a > T::ZERO) {
                            *d = T::ZERO;
                        }
                    }
                }
                Act::Sigmoid => {
                    for (d, a) in dprev.data.iter_mut().zip(&act_vals.data) {
                        *d = *d * *a * (T::ONE - *a);
                    }
                }
                Act::Softmax => unreachable!("softmax only terminates the decoder"),
            }
        }
        delta_z = dprev;
    }
    delta_z
}

/// Mean categorical cross-entropy (natural log) over the batch; predictions
/// are clamped at 1e-12 before the log.
pub fn cce_loss<T: Scalar>(yhat: &Tensor<T>, targets: &[u32]) -> f64 {
    assert_eq!(yhat.rows, targets.len());
    cce_loss_sum(yhat, targets) / yhat.rows as f64
}

fn cce_loss_sum<T: Scalar>(yhat: &Tensor<T>, targets: &[u32]) -> f64 {
    let mut sum = 0.0;
    for (r, &t) in targets.iter().enumerate() {
        let p = yhat.row(r)[t as usize].to_f64().max(1e-12);
        sum -= p.ln();
    }
    sum
}

/// Index of the largest entry; ties resolve to the lowest index.
pub fn argmax_decode<T: Scalar>(row: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in row.iter().enumerate().skip(1) {
        if *v > row[best] {
            best = i;
        }
    }
    best
}

/// Mean loss and summed gradients for one batch, computed in fixed 64-row
/// chunks folded in chunk order. Waves of 16 chunks run in parallel; the
/// result is bit-identical to the sequential evaluation.
pub fn batch_gradients<T: Scalar>(
    net: &Network<T>,
    records: &[SampleRecord],
    mode: VqMode,
) -> Result<(f64, Grads<T>), NetError> {
    if records.is_empty() {
        return Err(NetError::EmptyBatch);
    }
    const WAVE: usize = 16;
    let rows = records.len();
    let scale = 1.0 / rows as f64;
    let chunk = exec::CHUNK_ROWS;
    let nchunks = rows.div_ceil(chunk);
    let mut total = Grads::zeros_like(net);
    let mut loss_sum = 0.0;
    let mut c0 = 0;
    while c0 < nchunks {
        let wave = WAVE.min(nchunks - c0);
        let parts = exec::map_indexed(wave, |w| -> Result<(f64, Grads<T>), NetError> {
            let start = (c0 + w) * chunk;
            let len = chunk.min(rows - start);
            let recs = &records[start..start + len];
            let fwd = net.forward_with_mode(recs, mode)?;
            let targets: Vec<u32> = recs.iter().map(|r| r.y).collect();
            let loss = cce_loss_sum(fwd.output(), &targets);
            let grads = net.backward(&fwd, &targets, scale);
            Ok((loss, grads))
        });
        for part in parts {
            let (ls, g) = part?;
            loss_sum += ls;
            total.add_assign(&g);
        }
        c0 += wave;
    }
    Ok((loss_sum / rows as f64, total))
}
