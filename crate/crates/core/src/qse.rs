//! Quantum steering ellipsoid geometry: steered states, center, orientation
//! matrix, semi-axes, normalized volume, dimension classification, and the
//! complete/incomplete steering flag.

use crate::error::{Error, Result};
use crate::state::{DensityMatrix, PovmElement};
use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

/// Threshold below which a semi-axis counts as collapsed (Bloch units).
pub const AXIS_ZERO_TOL: f64 = 1e-7;

/// Which party is steered: `BGivenA` is Bob's ellipsoid under Alice's
/// measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SteeringDirection {
    BGivenA,
    AGivenB,
}

/// The (possibly degenerate) ellipsoid of steered Bloch vectors.
#[derive(Debug, Clone, Serialize)]
pub struct SteeringEllipsoid {
    pub center: Vector3<f64>,
    /// Orientation matrix Q; its eigenvalues are the squared semi-axes.
    pub orientation: Matrix3<f64>,
    /// Semi-axis lengths, sorted descending.
    pub semi_axes: [f64; 3],
    /// Orthonormal eigenvectors matching `semi_axes`.
    pub axes: [Vector3<f64>; 3],
    /// Number of semi-axes exceeding the degeneracy threshold: 3 for a full
    /// ellipsoid, 2 for a pancake, 1 for a needle, 0 for a point.
    pub dimension_class: usize,
    pub direction: SteeringDirection,
}

/// Bloch vector of Bob's steered state (b + Tᵀm)/(1 + a·m) for a POVM
/// element with direction m.
pub fn steered_bloch(rho: &DensityMatrix, povm: &PovmElement) -> Result<Vector3<f64>> {
    let rep = rho.pauli_decompose()?;
    let denom = 1.0 + rep.a.dot(&povm.direction);
    if denom <= 1e-12 {
        return Err(Error::DegenerateOutcome {
            probability: denom.max(0.0),
        });
    }
    Ok((rep.b + rep.t.transpose() * povm.direction) / denom)
}

/// Steering ellipsoid of the chosen direction.
///
/// For Bob given Alice: center (b - Tᵀa)/(1-a²) and orientation
/// Q = (T - abᵀ)ᵀ (1 + aaᵀ/(1-a²)) (T - abᵀ)/(1-a²).
pub fn steering_ellipsoid(
    rho: &DensityMatrix,
    direction: SteeringDirection,
) -> Result<SteeringEllipsoid> {
    let rep = rho.pauli_decompose()?;
    let (steering, steered, t) = match direction {
        SteeringDirection::BGivenA => (rep.a, rep.b, rep.t),
        SteeringDirection::AGivenB => (rep.b, rep.a, rep.t.transpose()),
    };
    let a_sq = steering.norm_squared();
    if a_sq > 1.0 - 1e-9 {
        return Err(Error::SingularMarginal { a_squared: a_sq });
    }
    let gamma = 1.0 / (1.0 - a_sq);
    let center = (steered - t.transpose() * steering) * gamma;
    let shifted = t - steering * steered.transpose();
    let middle = Matrix3::identity() + steering * steering.transpose() * gamma;
    let q = shifted.transpose() * middle * shifted * gamma;

    let eig = nalgebra::SymmetricEigen::new(q);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let mut semi_axes = [0.0; 3];
    let mut axes = [Vector3::zeros(); 3];
    for (k, &i) in order.iter().enumerate() {
        semi_axes[k] = eig.eigenvalues[i].max(0.0).sqrt();
        axes[k] = eig.eigenvectors.column(i).into();
    }
    let dimension_class = semi_axes.iter().filter(|&&s| s > AXIS_ZERO_TOL).count();

    Ok(SteeringEllipsoid {
        center,
        orientation: q,
        semi_axes,
        axes,
        dimension_class,
        direction,
    })
}

impl SteeringEllipsoid {
    /// Product of the three semi-axes (no 4π/3 factor).
    pub fn normalized_volume(&self) -> f64 {
        self.semi_axes.iter().product()
    }

    /// Containment diagnostics for a candidate steered Bloch vector:
    /// the quadratic form (v-c)ᵀ Q⁺ (v-c) restricted to the span of the
    /// nonzero axes, and the norm of the out-of-span component.
    pub fn containment(&self, v: &Vector3<f64>) -> (f64, f64) {
        let d = v - self.center;
        let mut quad = 0.0;
        let mut in_span = Vector3::zeros();
        for k in 0..3 {
            if self.semi_axes[k] > AXIS_ZERO_TOL {
                let coord = self.axes[k].dot(&d);
                quad += coord * coord / (self.semi_axes[k] * self.semi_axes[k]);
                in_span += self.axes[k] * coord;
            }
        }
        (quad, (d - in_span).norm())
    }

    /// UV-sphere surface mesh (rows of x, y, z) for external plotting.
    pub fn surface_mesh(&self, n_theta: usize, n_phi: usize) -> Vec<[f64; 3]> {
        let mut points = Vec::with_capacity(n_theta * n_phi);
        for it in 0..n_theta {
            let theta = std::f64::consts::PI * it as f64 / (n_theta - 1) as f64;
            for ip in 0..n_phi {
                let phi = 2.0 * std::f64::consts::PI * ip as f64 / n_phi as f64;
                let unit = Vector3::new(
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                );
                let mut p = self.center;
                for k in 0..3 {
                    p += self.axes[k] * (self.semi_axes[k] * unit[k]);
                }
                points.push([p.x, p.y, p.z]);
            }
        }
        points
    }
}

/// Normalized volume of Bob's steering ellipsoid; |c₁c₂c₃| for
/// Bell-diagonal states.
pub fn qse_volume_normalized(rho: &DensityMatrix) -> Result<f64> {
    Ok(steering_ellipsoid(rho, SteeringDirection::BGivenA)?.normalized_volume())
}

/// Sufficient condition for complete steering: the steering party's reduced
/// state is maximally mixed (Bloch norm ≤ 1e-9).
pub fn is_complete_steering(rho: &DensityMatrix, direction: SteeringDirection) -> Result<bool> {
    let rep = rho.pauli_decompose()?;
    let steering_party_bloch = match direction {
        SteeringDirection::BGivenA => rep.a,
        SteeringDirection::AGivenB => rep.b,
    };
    Ok(steering_party_bloch.norm() <= 1e-9)
}

/// Combined geometric classification of a two-qubit state.
#[derive(Debug, Clone, Serialize)]
pub struct QseClassification {
    /// Dimension class of Bob's ellipsoid E_{B|A}.
    pub dimension_class: usize,
    /// Maximal-mixedness sufficient condition on Alice's marginal.
    pub complete_steering: bool,
    /// Whether Alice's own ellipsoid E_{A|B} is at most one-dimensional and
    /// lies along a Bloch-ball diameter through the origin — the geometric
    /// signature of vanishing discord from Alice to Bob.
    pub discord_zero_needle_flag: bool,
    pub normalized_volume: f64,
}

/// Classify the QSE geometry: dimension class and complete-steering flag of
/// E_{B|A}, plus the needle-along-diameter flag of E_{A|B}.
pub fn classify_qse_state(rho: &DensityMatrix) -> Result<QseClassification> {
    let bob = steering_ellipsoid(rho, SteeringDirection::BGivenA)?;
    let alice = steering_ellipsoid(rho, SteeringDirection::AGivenB)?;
    let needle = alice.dimension_class <= 1 && {
        if alice.dimension_class == 0 {
            true
        } else {
            // Distance from the origin to the needle's supporting line.
            let u = alice.axes[0];
            (alice.center - u * alice.center.dot(&u)).norm() <= AXIS_ZERO_TOL
        }
    };
    Ok(QseClassification {
        dimension_class: bob.dimension_class,
        complete_steering: is_complete_steering(rho, SteeringDirection::BGivenA)?,
        discord_zero_needle_flag: needle,
        normalized_volume: bob.normalized_volume(),
    })
}
