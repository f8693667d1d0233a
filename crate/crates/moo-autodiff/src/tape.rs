use std::sync::atomic::{AtomicU64, Ordering};

use crate::AutodiffError;

/// Architecture of the shared-trunk multi-task MLP. `widths[0]` is the input
/// dimension, `widths[last]` the per-head class count, everything between is
/// a tanh trunk layer. Each task gets its own linear head off the trunk.
#[derive(Clone, Debug)]
pub struct MlpSpec {
    pub widths: Vec<usize>,
    pub tasks: usize,
}

impl MlpSpec {
    pub fn new(widths: Vec<usize>, tasks: usize) -> Result<Self, AutodiffError> {
        if widths.len() < 2 {
            return Err(AutodiffError::Config(format!(
                "need at least input and output widths, got {widths:?}"
            )));
        }
        if let Some(w) = widths.iter().find(|&&w| w == 0) {
            let _ = w;
            return Err(AutodiffError::Config(format!("zero-width layer in {widths:?}")));
        }
        if tasks < 2 {
            return Err(AutodiffError::Config(format!(
                "multi-task tape needs ≥ 2 tasks, got {tasks}"
            )));
        }
        Ok(MlpSpec { widths, tasks })
    }

    fn input_dim(&self) -> usize {
        self.widths[0]
    }

    fn classes(&self) -> usize {
        *self.widths.last().unwrap()
    }

    fn trunk_widths(&self) -> &[usize] {
        &self.widths[..self.widths.len() - 1]
    }
}

/// Fixed full-batch dataset with one class-label channel per task.
#[derive(Clone, Debug)]
pub struct TwoTaskDataset {
    pub inputs: Vec<f64>,
    pub labels: Vec<Vec<u8>>,
    pub n_points: usize,
    pub input_dim: usize,
}

impl TwoTaskDataset {
    pub fn new(
        inputs: Vec<f64>,
        labels: Vec<Vec<u8>>,
        n_points: usize,
        input_dim: usize,
    ) -> Result<Self, AutodiffError> {
        if n_points == 0 {
            return Err(AutodiffError::Config("dataset is empty".into()));
        }
        if inputs.len() != n_points * input_dim {
            return Err(AutodiffError::Dimension {
                context: "dataset inputs",
                expected: n_points * input_dim,
                got: inputs.len(),
            });
        }
        for (t, channel) in labels.iter().enumerate() {
            if channel.len() != n_points {
                return Err(AutodiffError::Config(format!(
                    "label channel {t} has {} entries for {n_points} points",
                    channel.len()
                )));
            }
        }
        Ok(TwoTaskDataset {
            inputs,
            labels,
            n_points,
            input_dim,
        })
    }
}

/// One contiguous slab of the flat parameter vector. `shape = (out, in)` for
/// weight matrices (row-major) and `(out, 1)` for biases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSegment {
    pub name: String,
    pub offset: usize,
    pub shape: (usize, usize),
}

impl ParamSegment {
    pub fn len(&self) -> usize {
        self.shape.0 * self.shape.1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Sweep tallies for cost assertions: one HVP must cost exactly one
/// augmented sweep, independent of parameter count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepCounts {
    pub forward: u64,
    pub reverse: u64,
    pub augmented: u64,
}

/// Differentiation tape for the fixed MLP graph over a fixed dataset.
pub struct Tape {
    spec: MlpSpec,
    dataset: TwoTaskDataset,
    layout: Vec<ParamSegment>,
    n_params: usize,
    forward_sweeps: AtomicU64,
    reverse_sweeps: AtomicU64,
    augmented_sweeps: AtomicU64,
}

/// Everything the reverse sweeps need from a primal forward pass.
struct ForwardPass {
    /// acts[l]: batch activations after trunk layer l (acts[0] = inputs).
    acts: Vec<Vec<f64>>,
    /// per task: batch softmax probabilities.
    probs: Vec<Vec<f64>>,
    losses: Vec<f64>,
}

impl Tape {
    pub fn new(spec: MlpSpec, dataset: TwoTaskDataset) -> Result<Self, AutodiffError> {
        if dataset.input_dim != spec.input_dim() {
            return Err(AutodiffError::Dimension {
                context: "dataset input dim",
                expected: spec.input_dim(),
                got: dataset.input_dim,
            });
        }
        if dataset.labels.len() != spec.tasks {
            return Err(AutodiffError::Config(format!(
                "dataset has {} label channels for {} tasks",
                dataset.labels.len(),
                spec.tasks
            )));
        }
        let classes = spec.classes();
        for channel in &dataset.labels {
            if let Some(&bad) = channel.iter().find(|&&l| (l as usize) >= classes) {
                return Err(AutodiffError::Config(format!(
                    "label {bad} out of range for {classes} classes"
                )));
            }
        }

        let mut layout = Vec::new();
        let mut offset = 0;
        let trunk = spec.trunk_widths();
        for l in 0..trunk.len() - 1 {
            let (inw, outw) = (trunk[l], trunk[l + 1]);
            layout.push(ParamSegment {
                name: format!("trunk{l}.w"),
                offset,
                shape: (outw, inw),
            });
            offset += outw * inw;
            layout.push(ParamSegment {
                name: format!("trunk{l}.b"),
                offset,
                shape: (outw, 1),
            });
            offset += outw;
        }
        let last = *trunk.last().unwrap();
        for t in 0..spec.tasks {
            layout.push(ParamSegment {
                name: format!("head{t}.w"),
                offset,
                shape: (classes, last),
            });
            offset += classes * last;
            layout.push(ParamSegment {
                name: format!("head{t}.b"),
                offset,
                shape: (classes, 1),
            });
            offset += classes;
        }

        Ok(Tape {
            spec,
            dataset,
            layout,
            n_params: offset,
            forward_sweeps: AtomicU64::new(0),
            reverse_sweeps: AtomicU64::new(0),
            augmented_sweeps: AtomicU64::new(0),
        })
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn n_tasks(&self) -> usize {
        self.spec.tasks
    }

    pub fn layout(&self) -> &[ParamSegment] {
        &self.layout
    }

    pub fn dataset(&self) -> &TwoTaskDataset {
        &self.dataset
    }

    pub fn sweeps(&self) -> SweepCounts {
        SweepCounts {
            forward: self.forward_sweeps.load(Ordering::Relaxed),
            reverse: self.reverse_sweeps.load(Ordering::Relaxed),
            augmented: self.augmented_sweeps.load(Ordering::Relaxed),
        }
    }

    fn segment<'x>(&self, x: &'x [f64], index: usize) -> &'x [f64] {
        let seg = &self.layout[index];
        &x[seg.offset..seg.offset + seg.len()]
    }

    fn trunk_layer_count(&self) -> usize {
        self.spec.trunk_widths().len() - 1
    }

    /// Segment indices (w, b) of trunk layer l.
    fn trunk_idx(&self, l: usize) -> (usize, usize) {
        (2 * l, 2 * l + 1)
    }

    /// Segment indices (w, b) of head t.
    fn head_idx(&self, t: usize) -> (usize, usize) {
        let base = 2 * self.trunk_layer_count();
        (base + 2 * t, base + 2 * t + 1)
    }

    fn check_x(&self, x: &[f64]) -> Result<(), AutodiffError> {
        if x.len() != self.n_params {
            return Err(AutodiffError::Dimension {
                context: "parameter vector",
                expected: self.n_params,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Both task losses from one shared-trunk forward pass.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, AutodiffError> {
        self.check_x(x)?;
        self.forward_sweeps.fetch_add(1, Ordering::Relaxed);
        let fwd = self.run_forward(x)?;
        Ok(fwd.losses)
    }

    /// ∇f_task(x) by reverse replay over one forward pass.
    pub fn gradient(&self, x: &[f64], task: usize) -> Result<Vec<f64>, AutodiffError> {
        self.check_x(x)?;
        if task >= self.spec.tasks {
            return Err(AutodiffError::BadTask {
                task,
                tasks: self.spec.tasks,
            });
        }
        let fwd = self.run_forward(x)?;
        self.forward_sweeps.fetch_add(1, Ordering::Relaxed);
        self.reverse_sweeps.fetch_add(1, Ordering::Relaxed);
        let mut seed = vec![0.0; self.spec.tasks];
        seed[task] = 1.0;
        self.run_reverse(x, &fwd, &seed)
    }

    /// All task gradients sharing a single forward pass.
    pub fn gradient_all(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, AutodiffError> {
        self.check_x(x)?;
        let fwd = self.run_forward(x)?;
        self.forward_sweeps.fetch_add(1, Ordering::Relaxed);
        let mut out = Vec::with_capacity(self.spec.tasks);
        for task in 0..self.spec.tasks {
            self.reverse_sweeps.fetch_add(1, Ordering::Relaxed);
            let mut seed = vec![0.0; self.spec.tasks];
            seed[task] = 1.0;
            out.push(self.run_reverse(x, &fwd, &seed)?);
        }
        Ok(out)
    }

    /// H(x)·v for H = Σ αᵢ∇²fᵢ(x), via one augmented forward+reverse sweep
    /// carrying directional-derivative (dual) values alongside the primals.
    pub fn hvp(&self, x: &[f64], alpha: &[f64], v: &[f64]) -> Result<Vec<f64>, AutodiffError> {
        self.check_x(x)?;
        if alpha.len() != self.spec.tasks {
            return Err(AutodiffError::Dimension {
                context: "task weights",
                expected: self.spec.tasks,
                got: alpha.len(),
            });
        }
        if v.len() != self.n_params {
            return Err(AutodiffError::Dimension {
                context: "hvp direction",
                expected: self.n_params,
                got: v.len(),
            });
        }
        self.augmented_sweeps.fetch_add(1, Ordering::Relaxed);
        self.run_augmented(x, alpha, v)
    }

    fn run_forward(&self, x: &[f64]) -> Result<ForwardPass, AutodiffError> {
        let n = self.dataset.n_points;
        let classes = self.spec.classes();
        let trunk = self.spec.trunk_widths();

        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(trunk.len());
        acts.push(self.dataset.inputs.clone());
        for l in 0..self.trunk_layer_count() {
            let (wi, bi) = self.trunk_idx(l);
            let mut z = affine(
                &acts[l],
                n,
                trunk[l],
                self.segment(x, wi),
                self.segment(x, bi),
                trunk[l + 1],
            );
            for zi in z.iter_mut() {
                *zi = zi.tanh();
            }
            acts.push(z);
        }

        let last = *trunk.last().unwrap();
        let mut probs = Vec::with_capacity(self.spec.tasks);
        let mut losses = Vec::with_capacity(self.spec.tasks);
        for t in 0..self.spec.tasks {
            let (wi, bi) = self.head_idx(t);
            let lg = affine(
                acts.last().unwrap(),
                n,
                last,
                self.segment(x, wi),
                self.segment(x, bi),
                classes,
            );
            let mut p = vec![0.0; n * classes];
            let mut loss = 0.0;
            for i in 0..n {
                let row = &lg[i * classes..(i + 1) * classes];
                let mx = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut denom = 0.0;
                for &l in row {
                    denom += (l - mx).exp();
                }
                let lse = mx + denom.ln();
                for (c, &l) in row.iter().enumerate() {
                    p[i * classes + c] = (l - lse).exp();
                }
                let y = self.dataset.labels[t][i] as usize;
                loss += lse - row[y];
            }
            loss /= n as f64;
            if !loss.is_finite() {
                return Err(AutodiffError::NonFinite("task loss"));
            }
            probs.push(p);
            losses.push(loss);
        }
        Ok(ForwardPass { acts, probs, losses })
    }

    /// Gradient of Σ_t seed_t · loss_t over the cached forward pass.
    fn run_reverse(
        &self,
        x: &[f64],
        fwd: &ForwardPass,
        seed: &[f64],
    ) -> Result<Vec<f64>, AutodiffError> {
        let n = self.dataset.n_points;
        let classes = self.spec.classes();
        let trunk = self.spec.trunk_widths();
        let last = *trunk.last().unwrap();
        let scale = 1.0 / n as f64;

        let mut grad = vec![0.0; self.n_params];
        let mut d_act = vec![0.0; n * last];

        for t in 0..self.spec.tasks {
            if seed[t] == 0.0 {
                continue;
            }
            let mut dlogits = fwd.probs[t].clone();
            for i in 0..n {
                let y = self.dataset.labels[t][i] as usize;
                dlogits[i * classes + y] -= 1.0;
            }
            for d in dlogits.iter_mut() {
                *d *= seed[t] * scale;
            }
            let (wi, bi) = self.head_idx(t);
            let acts_last = fwd.acts.last().unwrap();
            accumulate_tn(&dlogits, acts_last, n, classes, last, &mut grad[self.seg_range(wi)]);
            accumulate_col_sums(&dlogits, n, classes, &mut grad[self.seg_range(bi)]);
            accumulate_nn(&dlogits, self.segment(x, wi), n, classes, last, &mut d_act);
        }

        for l in (0..self.trunk_layer_count()).rev() {
            let a = &fwd.acts[l + 1];
            let width = trunk[l + 1];
            let mut dz = d_act;
            for (dzi, ai) in dz.iter_mut().zip(a) {
                *dzi *= 1.0 - ai * ai;
            }
            let (wi, bi) = self.trunk_idx(l);
            accumulate_tn(&dz, &fwd.acts[l], n, width, trunk[l], &mut grad[self.seg_range(wi)]);
            accumulate_col_sums(&dz, n, width, &mut grad[self.seg_range(bi)]);
            d_act = vec![0.0; n * trunk[l]];
            accumulate_nn(&dz, self.segment(x, wi), n, width, trunk[l], &mut d_act);
        }

        if grad.iter().any(|g| !g.is_finite()) {
            return Err(AutodiffError::NonFinite("gradient"));
        }
        Ok(grad)
    }

    fn seg_range(&self, index: usize) -> std::ops::Range<usize> {
        let seg = &self.layout[index];
        seg.offset..seg.offset + seg.len()
    }

    /// One augmented sweep: primal values plus their directional derivatives
    /// (duals) along v flow forward; primal adjoints plus their duals flow
    /// backward. The dual adjoints of the parameters are exactly H·v.
    fn run_augmented(&self, x: &[f64], alpha: &[f64], v: &[f64]) -> Result<Vec<f64>, AutodiffError> {
        let n = self.dataset.n_points;
        let classes = self.spec.classes();
        let trunk = self.spec.trunk_widths();
        let last = *trunk.last().unwrap();
        let scale = 1.0 / n as f64;

        // --- forward, primal + dual
        let mut acts: Vec<Vec<f64>> = vec![self.dataset.inputs.clone()];
        let mut dacts: Vec<Vec<f64>> = vec![vec![0.0; n * trunk[0]]];
        for l in 0..self.trunk_layer_count() {
            let (wi, bi) = self.trunk_idx(l);
            let (inw, outw) = (trunk[l], trunk[l + 1]);
            let mut z = affine(&acts[l], n, inw, self.segment(x, wi), self.segment(x, bi), outw);
            let mut zdot = affine(&dacts[l], n, inw, self.segment(x, wi), self.segment(v, bi), outw);
            // add a·Ẇᵀ to the dual pre-activation
            add_matmul_nt(&acts[l], self.segment(v, wi), n, inw, outw, &mut zdot);
            for (zi, zd) in z.iter_mut().zip(zdot.iter_mut()) {
                let a = zi.tanh();
                *zi = a;
                *zd *= 1.0 - a * a;
            }
            acts.push(z);
            dacts.push(zdot);
        }

        let acts_last = acts.last().unwrap();
        let dacts_last = dacts.last().unwrap();
        let mut probs: Vec<Vec<f64>> = Vec::with_capacity(self.spec.tasks);
        let mut pdots: Vec<Vec<f64>> = Vec::with_capacity(self.spec.tasks);
        for t in 0..self.spec.tasks {
            let (wi, bi) = self.head_idx(t);
            let lg = affine(acts_last, n, last, self.segment(x, wi), self.segment(x, bi), classes);
            let mut lgdot = affine(dacts_last, n, last, self.segment(x, wi), self.segment(v, bi), classes);
            add_matmul_nt(acts_last, self.segment(v, wi), n, last, classes, &mut lgdot);

            let mut p = vec![0.0; n * classes];
            let mut pdot = vec![0.0; n * classes];
            for i in 0..n {
                let row = &lg[i * classes..(i + 1) * classes];
                let drow = &lgdot[i * classes..(i + 1) * classes];
                let mx = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut denom = 0.0;
                for &l in row {
                    denom += (l - mx).exp();
                }
                let lse = mx + denom.ln();
                let mut mean_dot = 0.0;
                for (c, &l) in row.iter().enumerate() {
                    let pc = (l - lse).exp();
                    p[i * classes + c] = pc;
                    mean_dot += pc * drow[c];
                }
                for c in 0..classes {
                    pdot[i * classes + c] = p[i * classes + c] * (drow[c] - mean_dot);
                }
            }
            probs.push(p);
            pdots.push(pdot);
        }

        // --- reverse, primal adjoints (dz/d_act) + dual adjoints (hz/h_act)
        let mut hv = vec![0.0; self.n_params];
        let mut d_act = vec![0.0; n * last];
        let mut h_act = vec![0.0; n * last];

        for t in 0..self.spec.tasks {
            if alpha[t] == 0.0 {
                continue;
            }
            let mut dlogits = probs[t].clone();
            for i in 0..n {
                let y = self.dataset.labels[t][i] as usize;
                dlogits[i * classes + y] -= 1.0;
            }
            let mut hlogits = pdots[t].clone();
            for (d, h) in dlogits.iter_mut().zip(hlogits.iter_mut()) {
                *d *= alpha[t] * scale;
                *h *= alpha[t] * scale;
            }
            let (wi, bi) = self.head_idx(t);
            // dual of dW = dlogitsᵀ·a: product rule over both factors
            accumulate_tn(&hlogits, acts_last, n, classes, last, &mut hv[self.seg_range(wi)]);
            accumulate_tn(&dlogits, dacts_last, n, classes, last, &mut hv[self.seg_range(wi)]);
            accumulate_col_sums(&hlogits, n, classes, &mut hv[self.seg_range(bi)]);
            accumulate_nn(&dlogits, self.segment(x, wi), n, classes, last, &mut d_act);
            accumulate_nn(&hlogits, self.segment(x, wi), n, classes, last, &mut h_act);
            accumulate_nn(&dlogits, self.segment(v, wi), n, classes, last, &mut h_act);
        }

        for l in (0..self.trunk_layer_count()).rev() {
            let a = &acts[l + 1];
            let adot = &dacts[l + 1];
            let width = trunk[l + 1];
            let mut dz = d_act;
            let mut hz = h_act;
            for i in 0..n * width {
                let sech2 = 1.0 - a[i] * a[i];
                // dual of dz = da·(1 − a²): differentiate both da and a
                hz[i] = hz[i] * sech2 - 2.0 * dz[i] * a[i] * adot[i];
                dz[i] *= sech2;
            }
            let (wi, bi) = self.trunk_idx(l);
            accumulate_tn(&hz, &acts[l], n, width, trunk[l], &mut hv[self.seg_range(wi)]);
            accumulate_tn(&dz, &dacts[l], n, width, trunk[l], &mut hv[self.seg_range(wi)]);
            accumulate_col_sums(&hz, n, width, &mut hv[self.seg_range(bi)]);
            d_act = vec![0.0; n * trunk[l]];
            h_act = vec![0.0; n * trunk[l]];
            accumulate_nn(&dz, self.segment(x, wi), n, width, trunk[l], &mut d_act);
            accumulate_nn(&hz, self.segment(x, wi), n, width, trunk[l], &mut h_act);
            accumulate_nn(&dz, self.segment(v, wi), n, width, trunk[l], &mut h_act);
        }

        if hv.iter().any(|g| !g.is_finite()) {
            return Err(AutodiffError::NonFinite("hessian-vector product"));
        }
        Ok(hv)
    }
}

/// a(N×in) · Wᵀ(out×in) + b, row-major → N×out.
fn affine(a: &[f64], n: usize, inw: usize, w: &[f64], b: &[f64], outw: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * outw];
    for i in 0..n {
        let arow = &a[i * inw..(i + 1) * inw];
        let orow = &mut out[i * outw..(i + 1) * outw];
        for o in 0..outw {
            let wrow = &w[o * inw..(o + 1) * inw];
            let mut acc = b[o];
            for k in 0..inw {
                acc += arow[k] * wrow[k];
            }
            orow[o] = acc;
        }
    }
    out
}

/// out += a(N×in) · Wᵀ(out×in), no bias.
fn add_matmul_nt(a: &[f64], w: &[f64], n: usize, inw: usize, outw: usize, out: &mut [f64]) {
    for i in 0..n {
        let arow = &a[i * inw..(i + 1) * inw];
        let orow = &mut out[i * outw..(i + 1) * outw];
        for o in 0..outw {
            let wrow = &w[o * inw..(o + 1) * inw];
            let mut acc = 0.0;
            for k in 0..inw {
                acc += arow[k] * wrow[k];
            }
            orow[o] += acc;
        }
    }
}

/// out(q×p) += dᵀ(N×q)ᵀ · a(N×p): weight-gradient contraction.
fn accumulate_tn(d: &[f64], a: &[f64], n: usize, q: usize, p: usize, out: &mut [f64]) {
    for i in 0..n {
        let drow = &d[i * q..(i + 1) * q];
        let arow = &a[i * p..(i + 1) * p];
        for r in 0..q {
            let dv = drow[r];
            if dv == 0.0 {
                continue;
            }
            let orow = &mut out[r * p..(r + 1) * p];
            for c in 0..p {
                orow[c] += dv * arow[c];
            }
        }
    }
}

/// out(N×p) += d(N×q) · W(q×p).
fn accumulate_nn(d: &[f64], w: &[f64], n: usize, q: usize, p: usize, out: &mut [f64]) {
    for i in 0..n {
        let drow = &d[i * q..(i + 1) * q];
        let orow = &mut out[i * p..(i + 1) * p];
        for r in 0..q {
            let dv = drow[r];
            if dv == 0.0 {
                continue;
            }
            let wrow = &w[r * p..(r + 1) * p];
            for c in 0..p {
                orow[c] += dv * wrow[c];
            }
        }
    }
}

/// out(q) += column sums of d(N×q): bias gradients.
fn accumulate_col_sums(d: &[f64], n: usize, q: usize, out: &mut [f64]) {
    for i in 0..n {
        for c in 0..q {
            out[c] += d[i * q + c];
        }
    }
}
