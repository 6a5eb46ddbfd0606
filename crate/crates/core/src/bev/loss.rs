//! Weighted 3D parameter loss, angle loss and footprint-overlap penalty,
//! each with its analytic gradient.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::geometry::{bev_footprint, footprint_overlap_gradient, polygon_intersection_area, Box3D};

pub use crate::motion::loss::{huber, huber_grad, huber_grad_delta};

/// Box parameter names in [`Box3D::params`] order.
pub const BOX_PARAMS: [&str; 7] = ["cx", "cy", "cz", "h", "w", "l", "yaw"];

/// Positions of the footprint gradient components `[Cx, Cz, w, l, yaw]`
/// inside [`Box3D::params`].
const FOOTPRINT_INDEX: [usize; 5] = [0, 2, 4, 5, 6];

/// `0.5 (1 - cos(gt - pred))`: zero for equal orientations, one for opposite.
pub fn angle_loss(pred: f64, gt: f64) -> f64 {
    0.5 * (1.0 - (gt - pred).cos())
}

/// `d angle_loss / d pred`.
pub fn angle_loss_grad(pred: f64, gt: f64) -> f64 {
    -0.5 * (gt - pred).sin()
}

/// Unordered class pair key.
pub fn class_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// `α` (six box parameters then yaw), per-class `β`, per-parameter Huber
/// margins `δ` and per-class-pair `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BevLearnables {
    pub alpha: [f64; 7],
    pub beta: BTreeMap<String, f64>,
    pub delta: [f64; 6],
    /// Missing pairs read as zero.
    pub xi: BTreeMap<(String, String), f64>,
}

impl BevLearnables {
    /// `α = β = 1`, `δ = 1 m`, `ξ = 0` for the given classes.
    pub fn new<S: AsRef<str>>(classes: &[S]) -> Self {
        Self {
            alpha: [1.0; 7],
            beta: classes.iter().map(|c| (c.as_ref().to_string(), 1.0)).collect(),
            delta: [1.0; 6],
            xi: BTreeMap::new(),
        }
    }

    pub fn beta(&self, class: &str) -> Result<f64> {
        self.beta
            .get(class)
            .copied()
            .ok_or_else(|| invalid(format!("no class weight for `{class}`")))
    }

    pub fn xi(&self, a: &str, b: &str) -> f64 {
        self.xi.get(&class_pair(a, b)).copied().unwrap_or(0.0)
    }

    pub fn set_xi(&mut self, a: &str, b: &str, value: f64) {
        self.xi.insert(class_pair(a, b), value);
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(invalid("Huber margins must be positive"));
        }
        let finite = self.alpha.iter().chain(self.beta.values()).chain(self.xi.values()).all(|v| v.is_finite());
        if !finite {
            return Err(invalid("loss weights must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub class: String,
    pub pred: Box3D,
    pub gt: Box3D,
}

/// Predicted objects paired with their ground truth.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scene3D {
    pub objects: Vec<SceneObject>,
}

impl Scene3D {
    pub fn new(objects: Vec<SceneObject>) -> Self {
        Self { objects }
    }

    pub fn from_parallel(classes: &[&str], pred: &[Box3D], gt: &[Box3D]) -> Result<Self> {
        if classes.len() != pred.len() || pred.len() != gt.len() {
            return Err(invalid("class, prediction and ground-truth lists differ in length"));
        }
        Ok(Self::new(
            classes
                .iter()
                .zip(pred.iter().zip(gt))
                .map(|(c, (p, g))| SceneObject {
                    class: c.to_string(),
                    pred: *p,
                    gt: *g,
                })
                .collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Flat predicted parameters, seven per object.
    pub fn pred_params(&self) -> Vec<f64> {
        self.objects.iter().flat_map(|o| o.pred.params()).collect()
    }

    /// Replace predicted parameters (no wrapping or validation, so the map
    /// stays smooth for differentiation).
    pub fn set_pred_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), 7 * self.objects.len());
        for (o, p) in self.objects.iter_mut().zip(flat.chunks(7)) {
            o.pred = Box3D::from_params(p.try_into().expect("chunk of seven"));
        }
    }
}

/// Gradients of a loss with respect to predictions and learnables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BevGradient {
    /// One `[f64; 7]` per object, in [`Box3D::params`] order.
    pub pred: Vec<[f64; 7]>,
    pub alpha: [f64; 7],
    pub beta: BTreeMap<String, f64>,
    pub delta: [f64; 6],
    pub xi: BTreeMap<(String, String), f64>,
}

impl BevGradient {
    fn zeros(n: usize) -> Self {
        Self {
            pred: vec![[0.0; 7]; n],
            ..Self::default()
        }
    }

    pub fn add(&mut self, other: &BevGradient) {
        if self.pred.len() < other.pred.len() {
            self.pred.resize(other.pred.len(), [0.0; 7]);
        }
        for (a, b) in self.pred.iter_mut().zip(&other.pred) {
            for k in 0..7 {
                a[k] += b[k];
            }
        }
        for k in 0..7 {
            self.alpha[k] += other.alpha[k];
        }
        for k in 0..6 {
            self.delta[k] += other.delta[k];
        }
        for (c, v) in &other.beta {
            *self.beta.entry(c.clone()).or_insert(0.0) += v;
        }
        for (c, v) in &other.xi {
            *self.xi.entry(c.clone()).or_insert(0.0) += v;
        }
    }

    pub fn flat_pred(&self) -> Vec<f64> {
        self.pred.iter().flatten().copied().collect()
    }
}

fn object_terms(o: &SceneObject, learn: &BevLearnables) -> ([f64; 6], f64) {
    let (p, g) = (o.pred.params(), o.gt.params());
    let mut h = [0.0; 6];
    for k in 0..6 {
        h[k] = huber(p[k] - g[k], learn.delta[k]);
    }
    (h, angle_loss(p[6], g[6]))
}

/// `Σ_i β_class ( Σ_p α_p huber_δp(pred - gt) + α_θ angle_loss )`.
pub fn pred_loss(scene: &Scene3D, learn: &BevLearnables) -> Result<f64> {
    let mut total = 0.0;
    for o in &scene.objects {
        let beta = learn.beta(&o.class)?;
        let (h, a) = object_terms(o, learn);
        let inner: f64 = (0..6).map(|k| learn.alpha[k] * h[k]).sum::<f64>() + learn.alpha[6] * a;
        total += beta * inner;
    }
    Ok(total)
}

pub fn pred_loss_grad(scene: &Scene3D, learn: &BevLearnables) -> Result<BevGradient> {
    let mut g = BevGradient::zeros(scene.len());
    for (i, o) in scene.objects.iter().enumerate() {
        let beta = learn.beta(&o.class)?;
        let (p, t) = (o.pred.params(), o.gt.params());
        let (h, a) = object_terms(o, learn);
        let mut inner = learn.alpha[6] * a;
        for k in 0..6 {
            let e = p[k] - t[k];
            g.pred[i][k] = beta * learn.alpha[k] * huber_grad(e, learn.delta[k]);
            g.alpha[k] += beta * h[k];
            g.delta[k] += beta * learn.alpha[k] * huber_grad_delta(e, learn.delta[k]);
            inner += learn.alpha[k] * h[k];
        }
        g.pred[i][6] = beta * learn.alpha[6] * angle_loss_grad(p[6], t[6]);
        g.alpha[6] += beta * a;
        *g.beta.entry(o.class.clone()).or_insert(0.0) += inner;
    }
    Ok(g)
}

/// Footprint overlap area between predictions `i` and `j`.
pub fn pair_overlap(scene: &Scene3D, i: usize, j: usize) -> f64 {
    polygon_intersection_area(
        &bev_footprint(&scene.objects[i].pred),
        &bev_footprint(&scene.objects[j].pred),
    )
}

/// `Σ_{i<j} (1 + ξ²) · area(footprint_i ∩ footprint_j)` over predictions.
pub fn intersection_penalty(scene: &Scene3D, learn: &BevLearnables) -> f64 {
    let n = scene.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let area = pair_overlap(scene, i, j);
            if area > 0.0 {
                let xi = learn.xi(&scene.objects[i].class, &scene.objects[j].class);
                total += (1.0 + xi * xi) * area;
            }
        }
    }
    total
}

pub fn intersection_penalty_grad(scene: &Scene3D, learn: &BevLearnables) -> BevGradient {
    let n = scene.len();
    let mut g = BevGradient::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let (oi, oj) = (&scene.objects[i], &scene.objects[j]);
            let og = footprint_overlap_gradient(&oi.pred, &oj.pred);
            if og.area <= 0.0 {
                continue;
            }
            let xi = learn.xi(&oi.class, &oj.class);
            let w = 1.0 + xi * xi;
            for (k, &idx) in FOOTPRINT_INDEX.iter().enumerate() {
                g.pred[i][idx] += w * og.d_first[k];
                g.pred[j][idx] += w * og.d_second[k];
            }
            *g.xi.entry(class_pair(&oi.class, &oj.class)).or_insert(0.0) += 2.0 * xi * og.area;
        }
    }
    g
}

/// Prediction loss plus overlap penalty.
pub fn total_bev_loss(scene: &Scene3D, learn: &BevLearnables) -> Result<f64> {
    Ok(pred_loss(scene, learn)? + intersection_penalty(scene, learn))
}

pub fn total_bev_loss_grad(scene: &Scene3D, learn: &BevLearnables) -> Result<BevGradient> {
    let mut g = pred_loss_grad(scene, learn)?;
    g.add(&intersection_penalty_grad(scene, learn));
    Ok(g)
}
