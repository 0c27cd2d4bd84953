//! Named states and boxes, addressable by string id with parameters.
//!
//! Ids: `bell_diagonal`, `tau_pq`, `tau_prime`, `tau_dprime`, `rank2_1way`,
//! `rank2_2way`, `giorgi_n3`, `werner`, `pure_theta_phi`, `cq_generic`,
//! `box_bb84`, `box_extremal`, `box_noise`.

use crate::assemblage::NoSignalingBox;
use crate::bell::{self, BellDiagonalParams};
use crate::error::{Error, Result};
use crate::linalg::{cr, kron, mat2_to_dyn, CMatrix};
use crate::state::{cq_state, pure_qubit, DensityMatrix, QubitBasis};
use nalgebra::Vector3;
use serde::Serialize;
use serde_json::{Map, Value};

/// Parameter map for catalog constructors, as parsed from JSON.
pub type Params = Map<String, Value>;

/// A constructed catalog object.
#[derive(Debug, Clone)]
pub enum CatalogItem {
    State(DensityMatrix),
    Box(NoSignalingBox),
}

impl CatalogItem {
    pub fn into_state(self) -> Result<DensityMatrix> {
        match self {
            CatalogItem::State(s) => Ok(s),
            CatalogItem::Box(_) => Err(Error::BadParams(
                "catalog id names a box, not a state".into(),
            )),
        }
    }

    pub fn into_box(self) -> Result<NoSignalingBox> {
        match self {
            CatalogItem::Box(b) => Ok(b),
            CatalogItem::State(_) => Err(Error::BadParams(
                "catalog id names a state, not a box".into(),
            )),
        }
    }
}

/// Schema entry describing one catalog id.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub kind: &'static str,
    pub parameters: Vec<ParamSpec>,
    /// Which family or construction the entry realizes.
    pub reference: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub range: [f64; 2],
}

fn p(name: &'static str, default: f64, lo: f64, hi: f64) -> ParamSpec {
    ParamSpec {
        name,
        default,
        range: [lo, hi],
    }
}

/// Full catalog listing with parameter schemas.
pub fn entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            id: "bell_diagonal",
            kind: "state",
            parameters: vec![
                p("c1", 0.0, -1.0, 1.0),
                p("c2", 0.0, -1.0, 1.0),
                p("c3", 0.0, -1.0, 1.0),
            ],
            reference: "Bell-diagonal family with correlators (c1, c2, c3)",
        },
        CatalogEntry {
            id: "tau_pq",
            kind: "state",
            parameters: vec![p("p", 0.0, 0.0, 1.0), p("q", 0.0, 0.0, 1.0)],
            reference: "two-parameter Bell-diagonal mixture of Bell projectors",
        },
        CatalogEntry {
            id: "tau_prime",
            kind: "state",
            parameters: vec![],
            reference: "tetrahedral four-product decomposition; equals bell_diagonal(1/3, 1/3, 1/3)",
        },
        CatalogEntry {
            id: "tau_dprime",
            kind: "state",
            parameters: vec![],
            reference: "trine three-product decomposition; locally equivalent to bell_diagonal(1/2, 1/2, 0)",
        },
        CatalogEntry {
            id: "rank2_1way",
            kind: "state",
            parameters: vec![],
            reference: "rank-2 separable quantum-classical state (|00><00| + |+1><+1|)/2",
        },
        CatalogEntry {
            id: "rank2_2way",
            kind: "state",
            parameters: vec![],
            reference: "rank-2 separable two-way discordant state (|00><00| + |++><++|)/2",
        },
        CatalogEntry {
            id: "giorgi_n3",
            kind: "state",
            parameters: vec![],
            reference: "rank-3 separable state with nonmaximally mixed marginals",
        },
        CatalogEntry {
            id: "werner",
            kind: "state",
            parameters: vec![p("v", 0.5, 0.0, 1.0)],
            reference: "singlet mixed with white noise: v |b11><b11| + (1-v) 1/4",
        },
        CatalogEntry {
            id: "pure_theta_phi",
            kind: "state",
            parameters: vec![
                p("theta_a", 0.0, 0.0, std::f64::consts::PI),
                p("phi_a", 0.0, 0.0, std::f64::consts::TAU),
                p("theta_b", 0.0, 0.0, std::f64::consts::PI),
                p("phi_b", 0.0, 0.0, std::f64::consts::TAU),
            ],
            reference: "pure product state |θa,φa> ⊗ |θb,φb>",
        },
        CatalogEntry {
            id: "cq_generic",
            kind: "state",
            parameters: vec![
                p("p0", 0.5, 0.0, 1.0),
                p("theta", 0.0, 0.0, std::f64::consts::PI),
                p("phi", 0.0, 0.0, std::f64::consts::TAU),
                p("r0x", 0.0, -1.0, 1.0),
                p("r0y", 0.0, -1.0, 1.0),
                p("r0z", 0.5, -1.0, 1.0),
                p("r1x", 0.5, -1.0, 1.0),
                p("r1y", 0.0, -1.0, 1.0),
                p("r1z", 0.0, -1.0, 1.0),
            ],
            reference: "classical-quantum state p0 |e0><e0|⊗ρ0 + (1-p0) |e1><e1|⊗ρ1",
        },
        CatalogEntry {
            id: "box_bb84",
            kind: "box",
            parameters: vec![p("v", 0.5, 0.0, 1.0)],
            reference: "white-noise BB84 box p(ab|xy) = (1 + (-1)^{a+b+xy} δ_xy V)/4",
        },
        CatalogEntry {
            id: "box_extremal",
            kind: "box",
            parameters: vec![],
            reference: "extremal steerable two-setting box (1 + (-1)^{a+b+xy} δ_xy)/4",
        },
        CatalogEntry {
            id: "box_noise",
            kind: "box",
            parameters: vec![],
            reference: "white-noise box p(ab|xy) = 1/4",
        },
    ]
}

pub fn ids() -> Vec<&'static str> {
    entries().iter().map(|e| e.id).collect()
}

fn get_f64(params: &Params, name: &str, default: f64) -> Result<f64> {
    match params.get(name) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::BadParams(format!("parameter {name} must be a number"))),
    }
}

/// Construct a catalog state or box by id.
pub fn get(id: &str, params: &Params) -> Result<CatalogItem> {
    match id {
        "bell_diagonal" => {
            let c = Vector3::new(
                get_f64(params, "c1", 0.0)?,
                get_f64(params, "c2", 0.0)?,
                get_f64(params, "c3", 0.0)?,
            );
            let bd = BellDiagonalParams::new(c)
                .map_err(|e| Error::BadParams(format!("invalid correlators: {e}")))?;
            Ok(CatalogItem::State(bd.compose()?))
        }
        "tau_pq" => {
            let (_, _, rho) =
                bell::two_param(get_f64(params, "p", 0.0)?, get_f64(params, "q", 0.0)?)
                    .map_err(|e| Error::BadParams(format!("{e}")))?;
            Ok(CatalogItem::State(rho))
        }
        "tau_prime" => Ok(CatalogItem::State(tau_prime())),
        "tau_dprime" => Ok(CatalogItem::State(tau_dprime())),
        "rank2_1way" => Ok(CatalogItem::State(rank2_1way())),
        "rank2_2way" => Ok(CatalogItem::State(rank2_2way())),
        "giorgi_n3" => Ok(CatalogItem::State(giorgi_n3())),
        "werner" => {
            let v = get_f64(params, "v", 0.5)?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::BadParams(format!("werner v = {v} outside [0, 1]")));
            }
            Ok(CatalogItem::State(werner(v)))
        }
        "pure_theta_phi" => {
            let rho_a = pure_qubit(
                get_f64(params, "theta_a", 0.0)?,
                get_f64(params, "phi_a", 0.0)?,
            );
            let rho_b = pure_qubit(
                get_f64(params, "theta_b", 0.0)?,
                get_f64(params, "phi_b", 0.0)?,
            );
            Ok(CatalogItem::State(DensityMatrix::product(
                &mat2_to_dyn(&rho_a),
                &mat2_to_dyn(&rho_b),
            )?))
        }
        "cq_generic" => {
            let basis = QubitBasis::from_angles(
                get_f64(params, "theta", 0.0)?,
                get_f64(params, "phi", 0.0)?,
            );
            let r0 = Vector3::new(
                get_f64(params, "r0x", 0.0)?,
                get_f64(params, "r0y", 0.0)?,
                get_f64(params, "r0z", 0.5)?,
            );
            let r1 = Vector3::new(
                get_f64(params, "r1x", 0.5)?,
                get_f64(params, "r1y", 0.0)?,
                get_f64(params, "r1z", 0.0)?,
            );
            let rho = cq_state(&basis, get_f64(params, "p0", 0.5)?, [r0, r1])
                .map_err(|e| Error::BadParams(format!("{e}")))?;
            Ok(CatalogItem::State(rho))
        }
        "box_bb84" => {
            let v = get_f64(params, "v", 0.5)?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::BadParams(format!("box_bb84 v = {v} outside [0, 1]")));
            }
            Ok(CatalogItem::Box(bb84_box(v)))
        }
        "box_extremal" => Ok(CatalogItem::Box(extremal_box())),
        "box_noise" => Ok(CatalogItem::Box(noise_box(2))),
        other => Err(Error::UnknownId(other.to_string())),
    }
}

/// Bell-diagonal state with c = (1/3, 1/3, 1/3), built from its tetrahedral
/// product decomposition ¼ Σ Z_k ⊗ Z_k.
pub fn tau_prime() -> DensityMatrix {
    let theta_star = (-1.0f64 / 3.0).acos();
    let angles = [
        (0.0, 0.0),
        (theta_star, 0.0),
        (theta_star, 2.0 * std::f64::consts::PI / 3.0),
        (theta_star, 4.0 * std::f64::consts::PI / 3.0),
    ];
    let mut m = CMatrix::zeros(4, 4);
    for (theta, phi) in angles {
        let z = mat2_to_dyn(&pure_qubit(theta, phi));
        m += kron(&z, &z) * cr(0.25);
    }
    let rho = DensityMatrix::from_matrix(m, 2, 2).expect("tetrahedral mixture is a state");
    debug_assert!({
        let third = 1.0 / 3.0;
        let bd = BellDiagonalParams::new(Vector3::new(third, third, third))
            .unwrap()
            .compose()
            .unwrap();
        (rho.matrix() - bd.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            < 1e-12
    });
    rho
}

/// Rank-3 separable state from the trine product decomposition
/// ⅓ Σ W_k ⊗ W_k; locally unitarily equivalent to c = (1/2, 1/2, 0).
pub fn tau_dprime() -> DensityMatrix {
    let theta = 2.0 * std::f64::consts::PI / 3.0;
    let angles = [(0.0, 0.0), (theta, 0.0), (theta, std::f64::consts::PI)];
    let mut m = CMatrix::zeros(4, 4);
    for (th, ph) in angles {
        let w = mat2_to_dyn(&pure_qubit(th, ph));
        m += kron(&w, &w) * cr(1.0 / 3.0);
    }
    DensityMatrix::from_matrix(m, 2, 2).expect("trine mixture is a state")
}

/// Rank-2 separable one-way discordant state ½(|00⟩⟨00| + |+1⟩⟨+1|).
pub fn rank2_1way() -> DensityMatrix {
    let zero = mat2_to_dyn(&pure_qubit(0.0, 0.0));
    let one = mat2_to_dyn(&pure_qubit(std::f64::consts::PI, 0.0));
    let plus = mat2_to_dyn(&pure_qubit(std::f64::consts::FRAC_PI_2, 0.0));
    let m = (kron(&zero, &zero) + kron(&plus, &one)) * cr(0.5);
    DensityMatrix::from_matrix(m, 2, 2).expect("rank-2 mixture is a state")
}

/// Rank-2 separable two-way discordant state ½(|00⟩⟨00| + |++⟩⟨++|).
pub fn rank2_2way() -> DensityMatrix {
    let zero = mat2_to_dyn(&pure_qubit(0.0, 0.0));
    let plus = mat2_to_dyn(&pure_qubit(std::f64::consts::FRAC_PI_2, 0.0));
    let m = (kron(&zero, &zero) + kron(&plus, &plus)) * cr(0.5);
    DensityMatrix::from_matrix(m, 2, 2).expect("rank-2 mixture is a state")
}

/// Separable rank-3 state ¼(1⊗1 + 0.4 σ₁⊗1 + 0.4(1⊗σ₁ - 1⊗σ₃) + 0.2 σ₃⊗σ₃)
/// with nonmaximally mixed marginals on both sides.
pub fn giorgi_n3() -> DensityMatrix {
    use crate::state::PauliRepresentation;
    use nalgebra::Matrix3;
    PauliRepresentation {
        a: Vector3::new(0.4, 0.0, 0.0),
        b: Vector3::new(0.4, 0.0, -0.4),
        t: Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 0.2)),
    }
    .compose()
    .expect("documented state is valid")
}

/// Werner state v |β₁₁⟩⟨β₁₁| + (1-v) 1/4 (singlet convention).
pub fn werner(v: f64) -> DensityMatrix {
    let singlet = crate::state::bell_state(1, 1);
    let m = singlet.matrix() * cr(v) + CMatrix::identity(4, 4) * cr((1.0 - v) / 4.0);
    DensityMatrix::from_matrix(m, 2, 2).expect("Werner mixture is a state")
}

/// White-noise BB84 family p(ab|xy) = (1 + (-1)^{a⊕b⊕xy} δ_xy V)/4.
pub fn bb84_box(v: f64) -> NoSignalingBox {
    NoSignalingBox::from_fn(2, 2, 2, 2, |x, y, a, b| {
        let delta = if x == y { 1.0 } else { 0.0 };
        let sign = if (a + b + x * y) % 2 == 0 { 1.0 } else { -1.0 };
        (1.0 + sign * delta * v) / 4.0
    })
    .expect("BB84 box is no-signaling")
}

/// Extremal steerable two-setting box: BB84 at V = 1.
pub fn extremal_box() -> NoSignalingBox {
    bb84_box(1.0)
}

/// Uniform white-noise box on n settings per side.
pub fn noise_box(n: usize) -> NoSignalingBox {
    NoSignalingBox::from_fn(n, n, 2, 2, |_, _, _, _| 0.25).expect("white noise is no-signaling")
}
