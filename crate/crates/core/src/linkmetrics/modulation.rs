use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// A binary scheme with conditional BEP `Gamma(b, a x) / (2 Gamma(b))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinaryModulation {
    pub name: &'static str,
    pub a: f64,
    pub b: f64,
}

impl BinaryModulation {
    pub const BPSK: Self = BinaryModulation {
        name: "BPSK",
        a: 1.0,
        b: 0.5,
    };
    pub const DBPSK: Self = BinaryModulation {
        name: "DBPSK",
        a: 1.0,
        b: 1.0,
    };
    pub const BFSK: Self = BinaryModulation {
        name: "BFSK",
        a: 0.5,
        b: 0.5,
    };
    pub const NBFSK: Self = BinaryModulation {
        name: "NBFSK",
        a: 0.5,
        b: 1.0,
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MAryKind {
    Qam,
    Psk,
}

/// Gray-mapped M-ary scheme with conditional BEP
/// `a_M sum_{k=1}^{tau_M} erfc(sqrt(b_k x))`.
#[derive(Clone, Debug, PartialEq)]
pub struct MAryModulation {
    kind: MAryKind,
    order: u32,
    a: f64,
    b: Vec<f64>,
}

impl MAryModulation {
    /// Square `M`-QAM; `M` must be an even power of two.
    pub fn qam(order: u32) -> Result<Self> {
        if order < 4 || !order.is_power_of_two() || order.trailing_zeros() % 2 == 1 {
            return Err(Error::InvalidParameter(format!(
                "QAM order must be a square power of two >= 4, got {order}"
            )));
        }
        let bits = f64::from(order.trailing_zeros());
        let side = f64::from(order).sqrt();
        let tau = (side / 2.0) as u32;
        let step = 3.0 * bits / (2.0 * (f64::from(order) - 1.0));
        Ok(MAryModulation {
            kind: MAryKind::Qam,
            order,
            a: 2.0 / bits * (1.0 - 1.0 / side),
            b: (1..=tau).map(|k| step * f64::from(2 * k - 1).powi(2)).collect(),
        })
    }

    /// `M`-PSK; `M` must be a power of two of at least 4.
    pub fn psk(order: u32) -> Result<Self> {
        if order < 4 || !order.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "PSK order must be a power of two >= 4, got {order}"
            )));
        }
        let bits = f64::from(order.trailing_zeros());
        let tau = (order / 4).max(1);
        Ok(MAryModulation {
            kind: MAryKind::Psk,
            order,
            a: 1.0 / bits.max(2.0),
            b: (1..=tau)
                .map(|k| bits * (f64::from(2 * k - 1) * PI / f64::from(order)).sin().powi(2))
                .collect(),
        })
    }

    pub fn kind(&self) -> MAryKind {
        self.kind
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn tau(&self) -> u32 {
        self.b.len() as u32
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModulationScheme {
    Binary(BinaryModulation),
    MAry(MAryModulation),
}

impl ModulationScheme {
    /// Parses `bpsk`, `dbpsk`, `bfsk`, `nbfsk`, `qam:M` or `psk:M`.
    pub fn parse(text: &str) -> Result<Self> {
        let lower = text.trim().to_ascii_lowercase();
        let binary = match lower.as_str() {
            "bpsk" => Some(BinaryModulation::BPSK),
            "dbpsk" => Some(BinaryModulation::DBPSK),
            "bfsk" => Some(BinaryModulation::BFSK),
            "nbfsk" => Some(BinaryModulation::NBFSK),
            _ => None,
        };
        if let Some(b) = binary {
            return Ok(ModulationScheme::Binary(b));
        }
        let bad = || Error::InvalidParameter(format!("unknown modulation '{text}'"));
        let (kind, order) = lower.split_once(':').ok_or_else(bad)?;
        let order: u32 = order.parse().map_err(|_| bad())?;
        match kind {
            "qam" => MAryModulation::qam(order).map(ModulationScheme::MAry),
            "psk" => MAryModulation::psk(order).map(ModulationScheme::MAry),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModulationScheme::Binary(b) => f.write_str(&b.name.to_ascii_lowercase()),
            ModulationScheme::MAry(m) => match m.kind {
                MAryKind::Qam => write!(f, "qam:{}", m.order),
                MAryKind::Psk => write!(f, "psk:{}", m.order),
            },
        }
    }
}
