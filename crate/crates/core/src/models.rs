//! The regularized model family and admissible initial data.
//!
//! Every model is written as `M(D) u_t + D f(u) + S(D) u = 0` in Fourier
//! space: `mass_symbol` is the multiplier of `u_t`, `stiffness_symbol` the
//! linear part, and `f` is `u^2` or `u^2 / 2` depending on the flux convention.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, Mollifier};
use crate::spectral::{differentiate, lp_norm, Field, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `u_t + (u^2)_x = 0`.
    Burgers,
    /// `u_t + (u^2)_x + beta^2 u_txxxx = eps u_xx`.
    Rosenau,
    /// Rosenau plus the RLW term `-beta u_txx`.
    RosenauRlw,
    /// Rosenau-RLW plus the KdV term `beta u_xxx`.
    RosenauKdvRlw,
    /// `u_t + u u_x + beta u_xxx = eps u_xx`.
    Kdv,
}

impl ModelKind {
    pub fn is_rosenau_family(self) -> bool {
        matches!(self, ModelKind::Rosenau | ModelKind::RosenauRlw | ModelKind::RosenauKdvRlw)
    }

    pub fn has_rlw_term(self) -> bool {
        matches!(self, ModelKind::RosenauRlw | ModelKind::RosenauKdvRlw)
    }

    pub fn has_kdv_term(self) -> bool {
        matches!(self, ModelKind::Kdv | ModelKind::RosenauKdvRlw)
    }

    pub fn native_flux(self) -> FluxConvention {
        match self {
            ModelKind::Kdv => FluxConvention::HalfSquare,
            _ => FluxConvention::FullSquare,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Burgers => "burgers",
            ModelKind::Rosenau => "rosenau",
            ModelKind::RosenauRlw => "rosenau_rlw",
            ModelKind::RosenauKdvRlw => "rosenau_kdv_rlw",
            ModelKind::Kdv => "kdv",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxConvention {
    /// `f(u) = u^2`
    FullSquare,
    /// `f(u) = u^2 / 2`
    HalfSquare,
}

impl FluxConvention {
    pub fn flux(self, u: f64) -> f64 {
        match self {
            FluxConvention::FullSquare => u * u,
            FluxConvention::HalfSquare => 0.5 * u * u,
        }
    }

    pub fn speed(self, u: f64) -> f64 {
        match self {
            FluxConvention::FullSquare => 2.0 * u,
            FluxConvention::HalfSquare => u,
        }
    }

    /// `f'(u) / u`, the factor in `q'(u) = factor * u * eta'(u)`.
    pub fn slope_factor(self) -> f64 {
        match self {
            FluxConvention::FullSquare => 2.0,
            FluxConvention::HalfSquare => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FluxConvention::FullSquare => "full_square",
            FluxConvention::HalfSquare => "half_square",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub epsilon: f64,
    pub beta: f64,
    pub flux_convention: FluxConvention,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, epsilon: f64, beta: f64) -> Result<Self> {
        let m = Self { kind, epsilon, beta, flux_convention: kind.native_flux() };
        m.validate()?;
        Ok(m)
    }

    pub fn burgers() -> Self {
        Self { kind: ModelKind::Burgers, epsilon: 0.0, beta: 0.0, flux_convention: FluxConvention::FullSquare }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("epsilon", self.epsilon), ("beta", self.beta)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidModel(format!("{name} must lie in [0, 1), got {v}")));
            }
        }
        if self.kind == ModelKind::Burgers && (self.epsilon != 0.0 || self.beta != 0.0) {
            return Err(Error::InvalidModel("burgers requires epsilon = beta = 0".into()));
        }
        if self.flux_convention != self.kind.native_flux() {
            return Err(Error::InvalidModel(format!(
                "{} uses the {} flux, got {}",
                self.kind.name(),
                self.kind.native_flux().name(),
                self.flux_convention.name()
            )));
        }
        Ok(())
    }

    /// `u`-weighted energy `||u||^2 + [rlw] beta ||u_x||^2 + [rosenau] beta^2 ||u_xx||^2`.
    pub fn energy_weights(&self) -> (f64, f64) {
        let rlw = if self.kind.has_rlw_term() { self.beta } else { 0.0 };
        let ros = if self.kind.is_rosenau_family() { self.beta * self.beta } else { 0.0 };
        (rlw, ros)
    }
}

/// Multiplier of `u_t` in Fourier space; always `>= 1`.
pub fn mass_symbol(m: &ModelSpec, xi: f64) -> f64 {
    let x2 = xi * xi;
    match m.kind {
        ModelKind::Rosenau => 1.0 + m.beta * m.beta * x2 * x2,
        ModelKind::RosenauRlw | ModelKind::RosenauKdvRlw => 1.0 + m.beta * x2 + m.beta * m.beta * x2 * x2,
        ModelKind::Burgers | ModelKind::Kdv => 1.0,
    }
}

/// `sigma(xi)` with `u_t = -sigma / mass * u` for the linearization about zero.
///
/// The real part `eps xi^2` is viscous damping; the KdV term contributes
/// `-i beta xi^3` because `d^3/dx^3 e^{i xi x} = -i xi^3 e^{i xi x}`.
pub fn stiffness_symbol(m: &ModelSpec, xi: f64) -> Complex64 {
    let re = m.epsilon * xi * xi;
    let im = if m.kind.has_kdv_term() { -m.beta * xi * xi * xi } else { 0.0 };
    Complex64::new(re, im)
}

/// Per-mode symbols of a model on a grid, precomputed for the time stepper.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    pub grid: Arc<GridSpec>,
    pub model: ModelSpec,
    pub mass: Vec<f64>,
    /// `Re sigma / mass`.
    pub decay: Vec<f64>,
    /// `Im sigma / mass`.
    pub dispersion: Vec<f64>,
}

impl SymbolTable {
    pub fn new(model: &ModelSpec, grid: &Arc<GridSpec>) -> Self {
        let mass: Vec<f64> = grid.wavenumbers.iter().map(|&xi| mass_symbol(model, xi)).collect();
        let sig: Vec<Complex64> = grid.wavenumbers.iter().map(|&xi| stiffness_symbol(model, xi)).collect();
        let decay = sig.iter().zip(&mass).map(|(s, m)| s.re / m).collect();
        let dispersion = sig.iter().zip(&mass).map(|(s, m)| s.im / m).collect();
        Self { grid: grid.clone(), model: *model, mass, decay, dispersion }
    }

    /// Spectrum of the dealiased flux `f(u)`.
    pub fn flux_coeffs(&self, values: &[f64]) -> Vec<Complex64> {
        let conv = self.model.flux_convention;
        let fv: Vec<f64> = values.iter().map(|&u| conv.flux(u)).collect();
        let mut fc = self.grid.analyze(&fv);
        self.grid.dealias_coeffs(&mut fc);
        fc
    }

    /// Everything in the tendency except the viscous decay:
    /// `(-i xi F(u) - i Im sigma u) / mass`.
    pub fn explicit_part(&self, coeffs: &[Complex64], flux_enabled: bool) -> Vec<Complex64> {
        let g = &self.grid;
        let fc = if flux_enabled {
            let values = g.synthesize(coeffs);
            self.flux_coeffs(&values)
        } else {
            vec![Complex64::new(0.0, 0.0); g.n_modes]
        };
        (0..g.n_modes)
            .map(|j| {
                let adv = -g.derivative_symbol(j, 1) * fc[j] / self.mass[j];
                let disp = Complex64::new(0.0, -self.dispersion[j]) * coeffs[j];
                adv + disp
            })
            .collect()
    }

    pub fn tendency_coeffs(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut t = self.explicit_part(coeffs, true);
        for (j, tj) in t.iter_mut().enumerate() {
            *tj -= coeffs[j] * self.decay[j];
        }
        t
    }
}

/// `u_t` of the semidiscrete system at the state `f`.
pub fn tendency(m: &ModelSpec, f: &Field) -> Field {
    let table = SymbolTable::new(m, f.grid());
    let t = table.tendency_coeffs(f.coefficients());
    Field::from_coefficients(f.grid(), t).expect("length matches grid")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Profile {
    /// `u_left` on `[-L/2, x_jump)`, `u_right` on `[x_jump, L/2)`, zero elsewhere.
    MollifiedRiemann {
        u_left: f64,
        u_right: f64,
        x_jump: f64,
    },
    Gaussian {
        amplitude: f64,
        width: f64,
        center: f64,
    },
    Box {
        amplitude: f64,
        left: f64,
        right: f64,
    },
}

impl Profile {
    /// Piecewise-constant pieces `(value, a, b)`; empty for smooth profiles.
    fn pieces(&self, half_length: f64) -> Vec<(f64, f64, f64)> {
        match *self {
            Profile::MollifiedRiemann { u_left, u_right, x_jump } => {
                vec![(u_left, -0.5 * half_length, x_jump), (u_right, x_jump, 0.5 * half_length)]
            }
            Profile::Box { amplitude, left, right } => vec![(amplitude, left, right)],
            Profile::Gaussian { .. } => vec![],
        }
    }

    /// The unmollified datum `u_0(x)`.
    pub fn sharp_value(&self, x: f64, half_length: f64) -> f64 {
        match *self {
            Profile::Gaussian { amplitude, width, center } => amplitude * (-((x - center) / width).powi(2)).exp(),
            _ => self.pieces(half_length).iter().filter(|(_, a, b)| x >= *a && x < *b).map(|(v, _, _)| v).sum(),
        }
    }

    /// Mean of `u_0` over `[a, b]`.
    pub fn cell_average(&self, a: f64, b: f64, half_length: f64) -> f64 {
        match *self {
            Profile::Gaussian { .. } => {
                let f = |x: f64| self.sharp_value(x, half_length);
                adaptive_simpson(&f, a, b, 1e-13 * (b - a)) / (b - a)
            }
            _ => {
                self.pieces(half_length).iter().map(|&(v, lo, hi)| v * (b.min(hi) - a.max(lo)).max(0.0)).sum::<f64>()
                    / (b - a)
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        match *self {
            Profile::MollifiedRiemann { u_left, u_right, .. } => u_left.abs().max(u_right.abs()),
            Profile::Gaussian { amplitude, .. } => amplitude.abs(),
            Profile::Box { amplitude, .. } => amplitude.abs(),
        }
    }

    fn check_support(&self, half_length: f64) -> Result<()> {
        let lim = 0.5 * half_length;
        let ok = match *self {
            Profile::MollifiedRiemann { x_jump, .. } => x_jump.abs() < lim,
            Profile::Box { left, right, .. } => left >= -lim && right <= lim && left <= right,
            Profile::Gaussian { width, center, .. } => width > 0.0 && center.abs() <= lim,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInitialData(format!(
                "profile {self:?} does not fit inside [-L/2, L/2] with L = {half_length}"
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub profile: Profile,
    pub mollifier_width: f64,
    /// Bound every recorded initial-data norm must respect.
    pub c0: f64,
}

impl InitialData {
    /// Width tied to the regularization, `w = w0 max(eps, beta)^(1/4)`.
    pub fn for_model(profile: Profile, w0: f64, c0: f64, model: &ModelSpec) -> Self {
        let w = w0 * model.epsilon.max(model.beta).powf(0.25);
        Self { profile, mollifier_width: w, c0 }
    }
}

/// Discrete analogues of the initial-data bounds, plus the raw norms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InitialBounds {
    pub l2_sq: f64,
    pub l4_pow4: f64,
    pub ux_l2_sq: f64,
    pub uxx_l2_sq: f64,
    pub uxxx_l2_sq: f64,
    pub cubic_integral: f64,
    /// Model-specific weighted combinations checked against `c0`.
    pub checked: Vec<(String, f64)>,
}

impl InitialBounds {
    pub fn measure(field: &Field, m: &ModelSpec) -> Self {
        let (e, b) = (m.epsilon, m.beta);
        let norm2 = |f: &Field| lp_norm(f, 2.0).expect("p = 2 supported").powi(2);
        let ux = differentiate(field, 1).expect("order 1");
        let uxx = differentiate(field, 2).expect("order 2");
        let uxxx = differentiate(field, 3).expect("order 3");
        let mut out = InitialBounds {
            l2_sq: norm2(field),
            l4_pow4: lp_norm(field, 4.0).expect("p = 4 supported").powi(4),
            ux_l2_sq: norm2(&ux),
            uxx_l2_sq: norm2(&uxx),
            uxxx_l2_sq: norm2(&uxxx),
            cubic_integral: field.values().iter().map(|u| u * u * u).sum::<f64>() * field.grid().spacing,
            checked: vec![],
        };
        let first = out.l2_sq + (b.sqrt() + e * e) * out.ux_l2_sq;
        out.checked = if m.kind.is_rosenau_family() {
            vec![
                ("u0eps1_first".into(), first),
                ("u0eps1_higher".into(), (b * b + b * e * e) * out.uxx_l2_sq + b.powf(2.5) * out.uxxx_l2_sq),
                ("u0eps14_first".into(), out.l4_pow4 + first),
            ]
        } else if m.kind == ModelKind::Kdv {
            vec![
                ("a3_first".into(), out.l2_sq + b * out.ux_l2_sq),
                ("a3_cubic".into(), out.cubic_integral.abs()),
                ("n2_first".into(), out.l2_sq + b.sqrt() * out.ux_l2_sq),
            ]
        } else {
            vec![("l2".into(), out.l2_sq)]
        };
        out
    }
}

#[derive(Clone, Debug)]
pub struct InitialField {
    pub field: Field,
    pub bounds: InitialBounds,
}

/// Mollifies the profile with a compactly supported bump of width `w` and
/// records the initial-data bounds for the model.
pub fn make_initial_data(d: &InitialData, g: &Arc<GridSpec>, m: &ModelSpec) -> Result<InitialField> {
    m.validate()?;
    d.profile.check_support(g.half_length)?;
    let w = d.mollifier_width;
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::InvalidInitialData(format!("mollifier width must be >= 0, got {w}")));
    }
    if w > 0.25 * g.half_length {
        return Err(Error::InvalidInitialData(format!(
            "mollifier width {w} too wide for half-length {}",
            g.half_length
        )));
    }
    let values = mollified_values(&d.profile, w, g);
    let field = Field::from_values(g, values)?;
    let bounds = InitialBounds::measure(&field, m);
    for (name, value) in &bounds.checked {
        if !(*value <= d.c0) {
            return Err(Error::InitialBoundExceeded { name: name.clone(), value: *value, c0: d.c0 });
        }
    }
    Ok(InitialField { field, bounds })
}

fn mollified_values(profile: &Profile, w: f64, g: &GridSpec) -> Vec<f64> {
    let xs = g.points();
    let l = g.half_length;
    if w == 0.0 {
        return xs.iter().map(|&x| profile.sharp_value(x, l)).collect();
    }
    let moll = Mollifier::default();
    match *profile {
        Profile::Gaussian { .. } => xs
            .iter()
            .map(|&x| {
                let f = |s: f64| profile.sharp_value(x - w * s, l) * moll.density(s);
                adaptive_simpson(&f, -1.0, 1.0, 1e-14 * profile.max_abs().max(1e-300))
            })
            .collect(),
        _ => {
            let pieces = profile.pieces(l);
            xs.iter()
                .map(|&x| {
                    pieces
                        .iter()
                        .map(|&(v, a, b)| {
                            // profile(x - w s) = v  iff  (x - b)/w < s <= (x - a)/w
                            v * (moll.cdf((x - a) / w) - moll.cdf((x - b) / w))
                        })
                        .sum()
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn rosenau(eps: f64, beta: f64) -> ModelSpec {
        ModelSpec::new(ModelKind::Rosenau, eps, beta).unwrap()
    }

    #[test]
    fn mass_symbol_values() {
        assert_eq!(mass_symbol(&rosenau(0.1, 0.3), 0.0), 1.0);
        assert_relative_eq!(mass_symbol(&rosenau(0.0, 0.1), 2.0), 1.16, max_relative = 1e-14);
        let rlw = ModelSpec::new(ModelKind::RosenauRlw, 0.0, 0.5).unwrap();
        assert_relative_eq!(mass_symbol(&rlw, 1.0), 1.75);
        let kdv = ModelSpec::new(ModelKind::Kdv, 0.1, 0.2).unwrap();
        assert_eq!(mass_symbol(&kdv, 7.0), 1.0);
    }

    #[test]
    fn stiffness_symbol_values() {
        for kind in [ModelKind::Rosenau, ModelKind::RosenauRlw, ModelKind::RosenauKdvRlw, ModelKind::Kdv] {
            let m = ModelSpec::new(kind, 0.3, 0.2).unwrap();
            assert_eq!(stiffness_symbol(&m, 0.0), Complex64::new(0.0, 0.0));
        }
        let kdv = ModelSpec::new(ModelKind::Kdv, 0.1, 0.0).unwrap();
        let s = stiffness_symbol(&kdv, 3.0);
        assert_relative_eq!(s.re, 0.9, max_relative = 1e-14);
        assert_eq!(s.im, 0.0);
        let r = rosenau(0.0, 0.4);
        assert_eq!(stiffness_symbol(&r, 5.0), Complex64::new(0.0, 0.0));
        let kdv = ModelSpec::new(ModelKind::Kdv, 0.0, 0.5).unwrap();
        assert_relative_eq!(stiffness_symbol(&kdv, 2.0).im, -4.0);
    }

    #[test]
    fn model_validation() {
        assert!(ModelSpec::new(ModelKind::Rosenau, 1.0, 0.1).is_err());
        assert!(ModelSpec::new(ModelKind::Rosenau, 0.1, -0.1).is_err());
        assert!(ModelSpec::new(ModelKind::Burgers, 0.1, 0.0).is_err());
        let mut m = rosenau(0.1, 0.1);
        m.flux_convention = FluxConvention::HalfSquare;
        assert!(m.validate().is_err());
        assert_eq!(ModelSpec::new(ModelKind::Kdv, 0.1, 0.1).unwrap().flux_convention, FluxConvention::HalfSquare);
    }

    #[test]
    fn symbols_are_well_conditioned() {
        for kind in [ModelKind::Rosenau, ModelKind::RosenauRlw, ModelKind::RosenauKdvRlw, ModelKind::Kdv] {
            let m = ModelSpec::new(kind, 0.37, 0.61).unwrap();
            for i in -200..=200 {
                let xi = i as f64 * 0.37;
                assert!(mass_symbol(&m, xi) >= 1.0);
                assert!(stiffness_symbol(&m, xi).re >= 0.0);
            }
        }
    }

    #[test]
    fn tendency_of_zero_and_constants() {
        let g = make_grid(32, 3.0).unwrap();
        for kind in [ModelKind::Rosenau, ModelKind::RosenauRlw, ModelKind::RosenauKdvRlw, ModelKind::Kdv] {
            let m = ModelSpec::new(kind, 0.2, 0.1).unwrap();
            assert!(tendency(&m, &Field::zeros(&g)).max_abs() == 0.0);
            assert!(tendency(&m, &Field::from_fn(&g, |_| 1.7)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn burgers_tendency_of_sine() {
        // -(sin^2 x)_x = -2 sin x cos x = -sin 2x
        let g = make_grid(64, PI).unwrap();
        let f = Field::from_fn(&g, f64::sin);
        let t = tendency(&ModelSpec::burgers(), &f);
        let err = g.points().iter().zip(t.values()).fold(0.0f64, |m, (x, v)| m.max((v + (2.0 * x).sin()).abs()));
        assert!(err <= 1e-10, "err = {err}");
    }

    #[test]
    fn tendency_preserves_mean() {
        let g = make_grid(64, 4.0).unwrap();
        let f = crate::spectral::dealias(&Field::from_fn(&g, |x| (-(x * x)).exp() + 0.3 * (x * 0.8).sin()));
        for kind in [ModelKind::Rosenau, ModelKind::RosenauRlw, ModelKind::RosenauKdvRlw, ModelKind::Kdv] {
            let m = ModelSpec::new(kind, 0.2, 0.1).unwrap();
            assert!(tendency(&m, &f).coefficients()[0].norm() < 1e-15);
        }
    }

    #[test]
    fn zero_box_gives_zero_field() {
        let g = make_grid(128, 4.0).unwrap();
        let m = rosenau(0.1, 0.0001);
        let d = InitialData {
            profile: Profile::Box { amplitude: 0.0, left: -1.0, right: 1.0 },
            mollifier_width: 0.2,
            c0: 1.0,
        };
        let init = make_initial_data(&d, &g, &m).unwrap();
        assert_eq!(init.field.max_abs(), 0.0);
        assert!(init.bounds.checked.iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn mollified_riemann_is_bounded_and_monotone() {
        let g = make_grid(512, 4.0).unwrap();
        let m = rosenau(0.1, 0.0001);
        let d = InitialData {
            profile: Profile::MollifiedRiemann { u_left: 1.0, u_right: 0.0, x_jump: 0.0 },
            mollifier_width: 0.2,
            c0: 100.0,
        };
        let init = make_initial_data(&d, &g, &m).unwrap();
        let xs = g.points();
        let vals = init.field.values();
        assert!(vals.iter().all(|&v| (-1e-6..=1.0 + 1e-6).contains(&v)));
        let jump: Vec<f64> = xs.iter().zip(vals).filter(|(x, _)| x.abs() <= 0.3).map(|(_, v)| *v).collect();
        assert!(jump.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert_relative_eq!(jump[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(*jump.last().unwrap(), 0.0, epsilon = 1e-12);
        // independent check: brute-force midpoint quadrature of the convolution
        let moll = Mollifier::default();
        let i = xs.iter().position(|&x| (x - 0.046875).abs() < 1e-12).unwrap();
        // u0(x - y) = 1 exactly for y in (x, w)
        let n = 200_000;
        let h = (0.2 - xs[i]) / n as f64;
        let direct: f64 = (0..n).map(|k| xs[i] + (k as f64 + 0.5) * h).map(|y| moll.density(y / 0.2) / 0.2 * h).sum();
        assert_relative_eq!(vals[i], direct, epsilon = 1e-6);
    }

    #[test]
    fn gaussian_l2_norm_matches_closed_form() {
        let g = make_grid(256, 10.0).unwrap();
        let m = rosenau(0.1, 0.0001);
        let d = InitialData {
            profile: Profile::Gaussian { amplitude: 1.0, width: 0.5, center: 0.0 },
            mollifier_width: 1e-3,
            c0: 100.0,
        };
        let init = make_initial_data(&d, &g, &m).unwrap();
        let expected = 0.5 * (PI / 2.0).sqrt();
        assert!((init.bounds.l2_sq - expected).abs() <= 1e-6);
    }

    #[test]
    fn bound_violation_is_reported() {
        let g = make_grid(128, 8.0).unwrap();
        let m = rosenau(0.1, 0.0001);
        let d = InitialData {
            profile: Profile::Box { amplitude: 5.0, left: -2.0, right: 2.0 },
            mollifier_width: 0.5,
            c0: 10.0,
        };
        assert!(matches!(make_initial_data(&d, &g, &m), Err(Error::InitialBoundExceeded { .. })));
    }

    #[test]
    fn profile_outside_half_box_rejected() {
        let g = make_grid(128, 4.0).unwrap();
        let m = rosenau(0.1, 0.0001);
        let d = InitialData {
            profile: Profile::Box { amplitude: 1.0, left: -3.0, right: 1.0 },
            mollifier_width: 0.1,
            c0: 10.0,
        };
        assert!(make_initial_data(&d, &g, &m).is_err());
    }

    #[test]
    fn mollifier_width_rule() {
        let m = rosenau(0.0625, 0.0625f64.powi(4));
        let d = InitialData::for_model(Profile::Box { amplitude: 1.0, left: -1.0, right: 1.0 }, 2.0, 1.0, &m);
        assert_relative_eq!(d.mollifier_width, 1.0, max_relative = 1e-14);
    }
}
