//! Coordinates of the jet space: independent variables, jet variables of the
//! dependent fields, parameters and auxiliary dependent symbols.

use std::fmt;

/// Largest jet order the coordinate universe admits.
pub const MAX_JET_ORDER: u8 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Indep {
    X,
    T,
    /// Travelling coordinate used by seed solutions.
    Z,
}

/// Dependent fields that carry jet coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    U,
    V,
    /// Momentum `m = u - u_xx`, a first-class field only in momentum-independent contexts.
    M,
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Eta,
    Delta,
    Eps,
    U0,
    K,
    Theta,
    W,
    /// Formal imaginary unit, reduced by `i^2 = -1`.
    I,
    /// Formal square root of two, reduced by `sqrt2^2 = 2`.
    Sqrt2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Aux {
    Phi1,
    Phi2,
    PhiHat1,
    PhiHat2,
    P,
}

/// A coordinate. Identity is (kind, name, order): `Jet(U, 0)` is the bare `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Indep(Indep),
    Jet(Field, u8),
    Param(Param),
    Aux(Aux),
    /// Internal variable standing for an exponential generator during gcd.
    #[doc(hidden)]
    Laurent(u16),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordKind {
    Independent,
    Jet,
    Parameter,
    Auxiliary,
}

impl Coord {
    pub const X: Coord = Coord::Indep(Indep::X);
    pub const T: Coord = Coord::Indep(Indep::T);
    pub const Z: Coord = Coord::Indep(Indep::Z);
    pub const ETA: Coord = Coord::Param(Param::Eta);
    pub const DELTA: Coord = Coord::Param(Param::Delta);
    pub const EPS: Coord = Coord::Param(Param::Eps);
    pub const U0: Coord = Coord::Param(Param::U0);
    pub const K: Coord = Coord::Param(Param::K);
    pub const THETA: Coord = Coord::Param(Param::Theta);
    pub const W: Coord = Coord::Param(Param::W);
    pub const I: Coord = Coord::Param(Param::I);
    pub const SQRT2: Coord = Coord::Param(Param::Sqrt2);
    pub const PHI1: Coord = Coord::Aux(Aux::Phi1);
    pub const PHI2: Coord = Coord::Aux(Aux::Phi2);
    pub const PHIHAT1: Coord = Coord::Aux(Aux::PhiHat1);
    pub const PHIHAT2: Coord = Coord::Aux(Aux::PhiHat2);
    pub const P: Coord = Coord::Aux(Aux::P);

    pub fn u(k: u8) -> Coord {
        Coord::Jet(Field::U, k)
    }
    pub fn v(k: u8) -> Coord {
        Coord::Jet(Field::V, k)
    }
    pub fn m(k: u8) -> Coord {
        Coord::Jet(Field::M, k)
    }
    pub fn n(k: u8) -> Coord {
        Coord::Jet(Field::N, k)
    }

    pub fn kind(self) -> CoordKind {
        match self {
            Coord::Indep(_) => CoordKind::Independent,
            Coord::Jet(..) => CoordKind::Jet,
            Coord::Param(_) | Coord::Laurent(_) => CoordKind::Parameter,
            Coord::Aux(_) => CoordKind::Auxiliary,
        }
    }

    pub fn is_param(self) -> bool {
        matches!(self, Coord::Param(_))
    }

    /// Looks up a grammar identifier. `m`/`n` and their jets resolve to momentum
    /// jets here; alias expansion is the parser's business.
    pub fn from_name(name: &str) -> Option<Coord> {
        let c = match name {
            "x" => Coord::X,
            "t" => Coord::T,
            "z" => Coord::Z,
            "eta" => Coord::ETA,
            "delta" => Coord::DELTA,
            "eps" => Coord::EPS,
            "u0" => Coord::U0,
            "kk" => Coord::K,
            "theta" => Coord::THETA,
            "w" => Coord::W,
            "i" => Coord::I,
            "sqrt2" => Coord::SQRT2,
            "phi1" => Coord::PHI1,
            "phi2" => Coord::PHI2,
            "phih1" => Coord::PHIHAT1,
            "phih2" => Coord::PHIHAT2,
            "p" => Coord::P,
            _ => return jet_from_name(name),
        };
        Some(c)
    }
}

fn jet_from_name(name: &str) -> Option<Coord> {
    let mut chars = name.chars();
    let field = match chars.next()? {
        'u' => Field::U,
        'v' => Field::V,
        'm' => Field::M,
        'n' => Field::N,
        _ => return None,
    };
    let rest = chars.as_str();
    if rest.is_empty() {
        return Some(Coord::Jet(field, 0));
    }
    // `u0` is the parameter; jets never print a zero suffix.
    if rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let order: u8 = rest.parse().ok()?;
    (order <= MAX_JET_ORDER).then_some(Coord::Jet(field, order))
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::U => "u",
            Field::V => "v",
            Field::M => "m",
            Field::N => "n",
        })
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Indep(Indep::X) => f.write_str("x"),
            Coord::Indep(Indep::T) => f.write_str("t"),
            Coord::Indep(Indep::Z) => f.write_str("z"),
            Coord::Jet(field, 0) => write!(f, "{field}"),
            Coord::Jet(field, k) => write!(f, "{field}{k}"),
            Coord::Param(p) => f.write_str(match p {
                Param::Eta => "eta",
                Param::Delta => "delta",
                Param::Eps => "eps",
                Param::U0 => "u0",
                Param::K => "kk",
                Param::Theta => "theta",
                Param::W => "w",
                Param::I => "i",
                Param::Sqrt2 => "sqrt2",
            }),
            Coord::Aux(a) => f.write_str(match a {
                Aux::Phi1 => "phi1",
                Aux::Phi2 => "phi2",
                Aux::PhiHat1 => "phih1",
                Aux::PhiHat2 => "phih2",
                Aux::P => "p",
            }),
            Coord::Laurent(j) => write!(f, "_y{j}"),
        }
    }
}
