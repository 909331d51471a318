//! Virtual antenna array model: array factors, steering phases, directivity
//! gain, and mainlobe-relative signal ratios.
//!
//! Ground arrays are formed by selected sensors of an IoT cluster and aerial
//! arrays by the UAV swarm; both share the same far-field array factor
//!
//! ```text
//! AF(θ, φ) = Σᵢ Iᵢ · exp(j[k(xᵢ sinθ cosφ + yᵢ sinθ sinφ + zᵢ cosθ) + δᵢ])
//! ```
//!
//! with `k = 2π/λ` and per-element steering phases `δᵢ` chosen so all
//! contributions add in phase toward the steer direction. At the steer
//! direction the factor is therefore real and equals the sum of the selected
//! excitation weights.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::geometry::Point3;

#[derive(Debug, Error, PartialEq)]
pub enum BeamformingError {
    #[error("origin and target coincide; direction is undefined")]
    DegenerateDirection,
    #[error("selection mask has length {mask} but the array has {elements} elements")]
    MaskLength { mask: usize, elements: usize },
    #[error("all selected weights are zero; the pattern has no mainlobe")]
    ZeroPattern,
    #[error("angular grid must have at least one cell per axis")]
    EmptyGrid,
}

/// Propagation direction as elevation/azimuth angles: `theta ∈ [0, π]`
/// measured from the +z axis, `phi ∈ [−π, π]` in the ground plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub const fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Unit vector of the direction.
    pub fn unit(&self) -> [f64; 3] {
        let st = self.theta.sin();
        [st * self.phi.cos(), st * self.phi.sin(), self.theta.cos()]
    }
}

/// Direction from `origin` toward `target`.
pub fn direction_between(origin: &Point3, target: &Point3) -> Result<Direction, BeamformingError> {
    let d = origin.distance(target);
    if d == 0.0 {
        return Err(BeamformingError::DegenerateDirection);
    }
    let theta = ((target.z - origin.z) / d).clamp(-1.0, 1.0).acos();
    let phi = (target.y - origin.y).atan2(target.x - origin.x);
    Ok(Direction::new(theta, phi))
}

/// Steering phase of an element: the negative projection of its position on
/// the steer direction, scaled by the phase constant `2π/λ`.
pub fn steering_phase(element_pos: &Point3, steer: &Direction, wavelength: f64) -> f64 {
    let u = steer.unit();
    -(2.0 * PI / wavelength) * (element_pos.x * u[0] + element_pos.y * u[1] + element_pos.z * u[2])
}

/// One radiating element: a position and an excitation current weight in
/// `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayElement {
    pub position: Point3,
    pub weight: f64,
}

/// A virtual antenna array with its wavelength and steer direction. Steering
/// phases are implied by the steer direction; they are recomputed on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct ArraySpec {
    pub elements: Vec<ArrayElement>,
    pub wavelength: f64,
    pub steer: Direction,
}

/// Uniform midpoint quadrature over the sphere used for the directivity
/// integral. Nodes are cell midpoints, weighted by `sinθ · Δθ · Δφ`.
#[derive(Debug, Clone)]
pub struct AngularGrid {
    n_theta: usize,
    n_phi: usize,
    sin_theta: Vec<f64>,
    cos_theta: Vec<f64>,
    cos_phi: Vec<f64>,
    sin_phi: Vec<f64>,
    cell: f64,
}

impl AngularGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self, BeamformingError> {
        if n_theta == 0 || n_phi == 0 {
            return Err(BeamformingError::EmptyGrid);
        }
        let d_theta = PI / n_theta as f64;
        let d_phi = 2.0 * PI / n_phi as f64;
        let (mut sin_theta, mut cos_theta) = (Vec::with_capacity(n_theta), Vec::with_capacity(n_theta));
        for i in 0..n_theta {
            let t = (i as f64 + 0.5) * d_theta;
            sin_theta.push(t.sin());
            cos_theta.push(t.cos());
        }
        let (mut cos_phi, mut sin_phi) = (Vec::with_capacity(n_phi), Vec::with_capacity(n_phi));
        for j in 0..n_phi {
            let p = -PI + (j as f64 + 0.5) * d_phi;
            cos_phi.push(p.cos());
            sin_phi.push(p.sin());
        }
        Ok(Self { n_theta, n_phi, sin_theta, cos_theta, cos_phi, sin_phi, cell: d_theta * d_phi })
    }

    /// Grid with approximately `step_deg` degrees per cell on both axes.
    pub fn from_step_deg(step_deg: f64) -> Result<Self, BeamformingError> {
        if !(step_deg > 0.0) {
            return Err(BeamformingError::EmptyGrid);
        }
        let n_theta = (180.0 / step_deg).round().max(1.0) as usize;
        let n_phi = (360.0 / step_deg).round().max(1.0) as usize;
        Self::new(n_theta, n_phi)
    }

    /// Same span with twice the resolution on both axes.
    pub fn refined(&self) -> Self {
        Self::new(self.n_theta * 2, self.n_phi * 2).expect("refined grid is non-empty")
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }
}

impl ArraySpec {
    fn check_mask(&self, mask: Option<&[bool]>) -> Result<(), BeamformingError> {
        if let Some(m) = mask {
            if m.len() != self.elements.len() {
                return Err(BeamformingError::MaskLength { mask: m.len(), elements: self.elements.len() });
            }
        }
        Ok(())
    }

    fn selected<'a>(&'a self, mask: Option<&'a [bool]>) -> impl Iterator<Item = &'a ArrayElement> + 'a {
        self.elements
            .iter()
            .enumerate()
            .filter(move |(i, _)| mask.map_or(true, |m| m[*i]))
            .map(|(_, e)| e)
    }

    /// Sum of the selected excitation weights. Equals `|AF|` at the steer
    /// direction by construction of the steering phases.
    pub fn selected_weight_sum(&self, mask: Option<&[bool]>) -> f64 {
        self.selected(mask).map(|e| e.weight).sum()
    }

    /// Complex array factor toward `eval`, restricted to the masked elements
    /// when a mask is given.
    pub fn array_factor(
        &self,
        mask: Option<&[bool]>,
        eval: &Direction,
    ) -> Result<Complex64, BeamformingError> {
        self.check_mask(mask)?;
        let k = 2.0 * PI / self.wavelength;
        let u = eval.unit();
        let mut af = Complex64::new(0.0, 0.0);
        for e in self.selected(mask) {
            let delta = steering_phase(&e.position, &self.steer, self.wavelength);
            let phase = k * (e.position.x * u[0] + e.position.y * u[1] + e.position.z * u[2]) + delta;
            let (s, c) = phase.sin_cos();
            af += Complex64::new(e.weight * c, e.weight * s);
        }
        Ok(af)
    }

    /// Directivity gain toward the steer direction,
    /// `G₀ = 4π |AF(θ₀,φ₀)|² η / ∬ |AF(θ,φ)|² sinθ dθ dφ`,
    /// with the integral evaluated by midpoint quadrature on `grid`.
    ///
    /// The constant element pattern magnitude cancels between numerator and
    /// denominator, so isotropic elements need no extra factor.
    pub fn directivity_gain(
        &self,
        mask: Option<&[bool]>,
        efficiency: f64,
        grid: &AngularGrid,
    ) -> Result<f64, BeamformingError> {
        self.check_mask(mask)?;
        // Flatten the selected elements once; the quadrature loop below is the
        // hottest code path of the whole optimizer.
        let k = 2.0 * PI / self.wavelength;
        let els: Vec<(f64, f64, f64, f64, f64)> = self
            .selected(mask)
            .map(|e| {
                let delta = steering_phase(&e.position, &self.steer, self.wavelength);
                (k * e.position.x, k * e.position.y, k * e.position.z, delta, e.weight)
            })
            .collect();
        if els.iter().all(|e| e.4 == 0.0) {
            return Err(BeamformingError::ZeroPattern);
        }

        let mut integral = 0.0;
        for it in 0..grid.n_theta {
            let st = grid.sin_theta[it];
            let ct = grid.cos_theta[it];
            let mut ring = 0.0;
            for ip in 0..grid.n_phi {
                let ux = st * grid.cos_phi[ip];
                let uy = st * grid.sin_phi[ip];
                let (mut re, mut im) = (0.0, 0.0);
                for &(kx, ky, kz, delta, w) in &els {
                    let phase = kx * ux + ky * uy + kz * ct + delta;
                    let (s, c) = phase.sin_cos();
                    re += w * c;
                    im += w * s;
                }
                ring += re * re + im * im;
            }
            integral += ring * st;
        }
        integral *= grid.cell;

        let mainlobe: f64 = els.iter().map(|e| e.4).sum();
        Ok(4.0 * PI * mainlobe * mainlobe * efficiency / integral)
    }

    /// Ratio of the pattern magnitude toward `eavesdrop` to the mainlobe
    /// magnitude at the steer direction. The mainlobe value is real positive
    /// by construction, so it is evaluated as the weight sum.
    pub fn sll_ratio(
        &self,
        mask: Option<&[bool]>,
        eavesdrop: &Direction,
    ) -> Result<f64, BeamformingError> {
        self.check_mask(mask)?;
        let mainlobe = self.selected_weight_sum(mask);
        if mainlobe == 0.0 {
            return Err(BeamformingError::ZeroPattern);
        }
        Ok(self.array_factor(mask, eavesdrop)?.norm() / mainlobe)
    }

    /// Pattern magnitudes on a grid as CSV rows `theta_deg, phi_deg,
    /// af_magnitude`, for external plotting.
    pub fn beam_pattern_csv(
        &self,
        mask: Option<&[bool]>,
        grid: &AngularGrid,
    ) -> Result<String, BeamformingError> {
        self.check_mask(mask)?;
        let mut out = String::from("theta_deg,phi_deg,af_magnitude\n");
        let d_theta = 180.0 / grid.n_theta as f64;
        let d_phi = 360.0 / grid.n_phi as f64;
        for it in 0..grid.n_theta {
            for ip in 0..grid.n_phi {
                let theta_deg = (it as f64 + 0.5) * d_theta;
                let phi_deg = -180.0 + (ip as f64 + 0.5) * d_phi;
                let dir = Direction::new(theta_deg.to_radians(), phi_deg.to_radians());
                let mag = self.array_factor(mask, &dir)?.norm();
                out.push_str(&format!("{theta_deg},{phi_deg},{mag}\n"));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_array(positions: &[Point3], wavelength: f64, steer: Direction) -> ArraySpec {
        ArraySpec {
            elements: positions.iter().map(|&p| ArrayElement { position: p, weight: 1.0 }).collect(),
            wavelength,
            steer,
        }
    }

    #[test]
    fn direction_to_zenith() {
        let d = direction_between(&Point3::new(0.0, 0.0, 0.0), &Point3::new(0.0, 0.0, 5.0)).unwrap();
        assert_relative_eq!(d.theta, 0.0);
        assert_relative_eq!(d.phi, 0.0);
    }

    #[test]
    fn direction_along_x_axis() {
        let d = direction_between(&Point3::new(0.0, 0.0, 0.0), &Point3::new(1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(d.theta, PI / 2.0);
        assert_relative_eq!(d.phi, 0.0);
    }

    #[test]
    fn direction_downward_diagonal() {
        // arccos(−100/√20000) = 3π/4
        let d =
            direction_between(&Point3::new(0.0, 0.0, 100.0), &Point3::new(100.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(d.theta, 3.0 * PI / 4.0, max_relative = 1e-12);
        assert_relative_eq!(d.phi, 0.0);
    }

    #[test]
    fn direction_between_coincident_points_fails() {
        let p = Point3::new(1.0, 2.0, 3.0);
        assert_eq!(direction_between(&p, &p), Err(BeamformingError::DegenerateDirection));
    }

    #[test]
    fn steering_phase_at_origin_is_zero() {
        let steer = Direction::new(1.1, -2.3);
        assert_eq!(steering_phase(&Point3::new(0.0, 0.0, 0.0), &steer, 0.5), 0.0);
    }

    #[test]
    fn steering_phase_half_wavelength_offset() {
        let lambda = 0.4;
        let steer = Direction::new(PI / 2.0, 0.0);
        let phase = steering_phase(&Point3::new(lambda / 2.0, 0.0, 0.0), &steer, lambda);
        assert_relative_eq!(phase, -PI, max_relative = 1e-12);
    }

    #[test]
    fn steering_phase_vertical_element() {
        let lambda = 0.4;
        let steer = Direction::new(0.0, 0.0);
        let phase = steering_phase(&Point3::new(0.0, 0.0, lambda), &steer, lambda);
        assert_relative_eq!(phase, -2.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn single_element_af_is_its_weight_everywhere() {
        let spec = unit_array(&[Point3::new(0.0, 0.0, 0.0)], 0.33, Direction::new(0.3, 0.4));
        for (t, p) in [(0.0, 0.0), (1.0, -2.0), (3.0, 3.0)] {
            let af = spec.array_factor(None, &Direction::new(t, p)).unwrap();
            assert_relative_eq!(af.re, 1.0, max_relative = 1e-12);
            assert_relative_eq!(af.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn af_at_steer_equals_element_count_and_squares_to_n2_gain() {
        // 16 unit-weight elements anywhere: phases cancel at the steer
        // direction and the received-power gain is N².
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let positions: Vec<Point3> = (0..16)
            .map(|_| {
                Point3::new(
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(0.0..3.0),
                )
            })
            .collect();
        let steer = Direction::new(1.2, 0.7);
        let spec = unit_array(&positions, 0.333, steer);
        let af = spec.array_factor(None, &steer).unwrap();
        assert_relative_eq!(af.re, 16.0, max_relative = 1e-12);
        assert_relative_eq!(af.im, 0.0, epsilon = 1e-9);
        assert_relative_eq!(af.norm_sqr(), 256.0, max_relative = 1e-9);
    }

    #[test]
    fn af_respects_selection_mask() {
        let spec = unit_array(
            &[Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0)],
            0.5,
            Direction::new(0.0, 0.0),
        );
        let mask = [true, false];
        let af = spec.array_factor(Some(&mask), &spec.steer).unwrap();
        assert_relative_eq!(af.re, 1.0, max_relative = 1e-12);
        let bad = spec.array_factor(Some(&[true]), &spec.steer);
        assert_eq!(bad, Err(BeamformingError::MaskLength { mask: 1, elements: 2 }));
    }

    #[test]
    fn single_isotropic_element_has_unit_directivity() {
        let spec = unit_array(&[Point3::new(0.0, 0.0, 0.0)], 0.33, Direction::new(0.2, 0.1));
        let grid = AngularGrid::from_step_deg(1.0).unwrap();
        let g = spec.directivity_gain(None, 1.0, &grid).unwrap();
        assert_relative_eq!(g, 1.0, max_relative = 1e-3);
    }

    #[test]
    fn two_element_broadside_directivity_is_two() {
        // λ/2 spacing along x, steered to the zenith: D = 2/(1 + sinc(kd)),
        // and sinc(π) = 0.
        let lambda = 0.333;
        let spec = unit_array(
            &[Point3::new(0.0, 0.0, 0.0), Point3::new(lambda / 2.0, 0.0, 0.0)],
            lambda,
            Direction::new(0.0, 0.0),
        );
        let grid = AngularGrid::from_step_deg(1.0).unwrap();
        let g = spec.directivity_gain(None, 1.0, &grid).unwrap();
        assert_relative_eq!(g, 2.0, max_relative = 1e-2);
    }

    #[test]
    fn directivity_scales_with_efficiency() {
        let spec = unit_array(&[Point3::new(0.0, 0.0, 0.0)], 0.33, Direction::new(0.2, 0.1));
        let grid = AngularGrid::from_step_deg(2.0).unwrap();
        assert_eq!(spec.directivity_gain(None, 0.0, &grid).unwrap(), 0.0);
    }

    #[test]
    fn zero_weights_are_a_zero_pattern_error() {
        let spec = ArraySpec {
            elements: vec![ArrayElement { position: Point3::new(0.0, 0.0, 0.0), weight: 0.0 }],
            wavelength: 0.33,
            steer: Direction::new(0.0, 0.0),
        };
        let grid = AngularGrid::from_step_deg(10.0).unwrap();
        assert_eq!(spec.directivity_gain(None, 1.0, &grid), Err(BeamformingError::ZeroPattern));
        assert_eq!(spec.sll_ratio(None, &Direction::new(1.0, 1.0)), Err(BeamformingError::ZeroPattern));
    }

    #[test]
    fn directivity_against_closed_form_oracle() {
        // Independent route: ∬|AF|² sinθ dθdφ has the exact closed form
        // 4π Σᵢⱼ Iᵢ Iⱼ cos(δᵢ−δⱼ) sinc(k‖pᵢ−pⱼ‖), so
        // G₀ = (ΣI)² η / Σᵢⱼ IᵢIⱼcos(δᵢ−δⱼ)sinc(k dᵢⱼ).
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lambda = 0.333;
        let k = 2.0 * PI / lambda;
        let steer = Direction::new(0.9, -1.4);
        let elements: Vec<ArrayElement> = (0..6)
            .map(|_| ArrayElement {
                position: Point3::new(
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(0.0..1.0),
                ),
                weight: rng.gen_range(0.2..1.0),
            })
            .collect();
        let spec = ArraySpec { elements: elements.clone(), wavelength: lambda, steer };

        let mut denom = 0.0;
        for a in &elements {
            for b in &elements {
                let da = steering_phase(&a.position, &steer, lambda);
                let db = steering_phase(&b.position, &steer, lambda);
                let d = a.position.distance(&b.position);
                let sinc = if d == 0.0 { 1.0 } else { (k * d).sin() / (k * d) };
                denom += a.weight * b.weight * (da - db).cos() * sinc;
            }
        }
        let weight_sum: f64 = elements.iter().map(|e| e.weight).sum();
        let oracle = weight_sum * weight_sum / denom;

        let grid = AngularGrid::from_step_deg(0.5).unwrap();
        let g = spec.directivity_gain(None, 1.0, &grid).unwrap();
        assert_relative_eq!(g, oracle, max_relative = 2e-3);
    }

    #[test]
    fn grid_refinement_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let positions: Vec<Point3> = (0..5)
            .map(|_| Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        let spec = unit_array(&positions, 0.333, Direction::new(0.4, 0.2));
        let grid = AngularGrid::from_step_deg(2.0).unwrap();
        let coarse = spec.directivity_gain(None, 1.0, &grid).unwrap();
        let fine = spec.directivity_gain(None, 1.0, &grid.refined()).unwrap();
        assert_relative_eq!(coarse, fine, max_relative = 5e-3);
    }

    #[test]
    fn sll_ratio_basics() {
        let steer = Direction::new(0.7, 0.3);
        let single = unit_array(&[Point3::new(0.3, -0.2, 0.1)], 0.33, steer);
        // A single element radiates isotropically: the ratio is 1 everywhere.
        assert_relative_eq!(single.sll_ratio(None, &Direction::new(2.0, -1.0)).unwrap(), 1.0);
        // At the steer direction the ratio is 1 for any array.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let many = unit_array(
            &(0..4)
                .map(|_| Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0))
                .collect::<Vec<_>>(),
            0.33,
            steer,
        );
        assert_relative_eq!(many.sll_ratio(None, &steer).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn sll_ratio_matches_direct_summation_oracle() {
        // Brute-force complex sum written out independently of array_factor.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let lambda = 0.333;
        let steer = Direction::new(1.0, 0.5);
        let eaves = Direction::new(1.9, -2.2);
        let elements: Vec<ArrayElement> = (0..8)
            .map(|_| ArrayElement {
                position: Point3::new(
                    rng.gen_range(-50.0..50.0),
                    rng.gen_range(-50.0..50.0),
                    0.0,
                ),
                weight: rng.gen_range(0.0..1.0),
            })
            .collect();
        let spec = ArraySpec { elements: elements.clone(), wavelength: lambda, steer };

        let k = 2.0 * PI / lambda;
        let project = |d: &Direction, p: &Point3| {
            p.x * d.theta.sin() * d.phi.cos() + p.y * d.theta.sin() * d.phi.sin() + p.z * d.theta.cos()
        };
        let (mut re, mut im) = (0.0, 0.0);
        let mut mainlobe = 0.0;
        for e in &elements {
            let phase = k * project(&eaves, &e.position) - k * project(&steer, &e.position);
            re += e.weight * phase.cos();
            im += e.weight * phase.sin();
            mainlobe += e.weight;
        }
        let oracle = (re * re + im * im).sqrt() / mainlobe;

        let got = spec.sll_ratio(None, &eaves).unwrap();
        assert_relative_eq!(got, oracle, max_relative = 1e-12);
    }

    #[test]
    fn af_bounded_by_weight_sum_and_invariant_under_weight_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let elements: Vec<ArrayElement> = (0..7)
            .map(|_| ArrayElement {
                position: Point3::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), 0.0),
                weight: rng.gen_range(0.1..1.0),
            })
            .collect();
        let spec =
            ArraySpec { elements: elements.clone(), wavelength: 0.333, steer: Direction::new(0.8, 0.1) };
        let scaled = ArraySpec {
            elements: elements.iter().map(|e| ArrayElement { weight: e.weight * 0.37, ..*e }).collect(),
            ..spec.clone()
        };
        let grid = AngularGrid::from_step_deg(3.0).unwrap();
        let weight_sum = spec.selected_weight_sum(None);
        for i in 0..20 {
            let dir = Direction::new(rng.gen_range(0.0..PI), rng.gen_range(-PI..PI));
            let af = spec.array_factor(None, &dir).unwrap().norm();
            assert!(af <= weight_sum + 1e-9, "triangle inequality violated at sample {i}");
            let r1 = spec.sll_ratio(None, &dir).unwrap();
            let r2 = scaled.sll_ratio(None, &dir).unwrap();
            assert_relative_eq!(r1, r2, max_relative = 1e-12);
        }
        let g1 = spec.directivity_gain(None, 1.0, &grid).unwrap();
        let g2 = scaled.directivity_gain(None, 1.0, &grid).unwrap();
        assert_relative_eq!(g1, g2, max_relative = 1e-12);
    }

    #[test]
    fn beam_pattern_csv_shape() {
        let spec = unit_array(&[Point3::new(0.0, 0.0, 0.0)], 0.33, Direction::new(0.0, 0.0));
        let grid = AngularGrid::new(4, 8).unwrap();
        let csv = spec.beam_pattern_csv(None, &grid).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "theta_deg,phi_deg,af_magnitude");
        assert_eq!(lines.len(), 1 + 4 * 8);
    }
}
