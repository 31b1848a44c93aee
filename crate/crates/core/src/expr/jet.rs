use serde::{Serialize, Serializer};

use super::{Coords, EvalError, Expr, Var};

/// Every multi-index `(nx, ny, nalpha)` of total order at most three, in
/// graded order. Position in this list is the storage slot in [`Jet3`].
pub const MULTI_INDICES: [(u8, u8, u8); 20] = [
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (2, 0, 0),
    (1, 1, 0),
    (1, 0, 1),
    (0, 2, 0),
    (0, 1, 1),
    (0, 0, 2),
    (3, 0, 0),
    (2, 1, 0),
    (2, 0, 1),
    (1, 2, 0),
    (1, 1, 1),
    (1, 0, 2),
    (0, 3, 0),
    (0, 2, 1),
    (0, 1, 2),
    (0, 0, 3),
];

fn slot(nx: u8, ny: u8, na: u8) -> usize {
    MULTI_INDICES
        .iter()
        .position(|&m| m == (nx, ny, na))
        .unwrap_or_else(|| panic!("derivative order ({nx},{ny},{na}) exceeds three"))
}

/// Value and all partial derivatives up to total order three at one point.
///
/// Mixed partials are stored once per multi-index, so symmetry holds by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    entries: [f64; 20],
}

impl Jet3 {
    pub fn from_entries(entries: [f64; 20]) -> Self {
        Jet3 { entries }
    }

    pub fn entries(&self) -> &[f64; 20] {
        &self.entries
    }

    /// Partial derivative of order `(nx, ny, na)`. Panics if the total order exceeds 3.
    pub fn d(&self, nx: u8, ny: u8, na: u8) -> f64 {
        self.entries[slot(nx, ny, na)]
    }

    pub fn value(&self) -> f64 {
        self.entries[0]
    }
    pub fn x(&self) -> f64 {
        self.entries[1]
    }
    pub fn y(&self) -> f64 {
        self.entries[2]
    }
    pub fn a(&self) -> f64 {
        self.entries[3]
    }
    pub fn xx(&self) -> f64 {
        self.entries[4]
    }
    pub fn xy(&self) -> f64 {
        self.entries[5]
    }
    pub fn xa(&self) -> f64 {
        self.entries[6]
    }
    pub fn yy(&self) -> f64 {
        self.entries[7]
    }
    pub fn ya(&self) -> f64 {
        self.entries[8]
    }
    pub fn aa(&self) -> f64 {
        self.entries[9]
    }
    pub fn xxx(&self) -> f64 {
        self.entries[10]
    }
}

impl Serialize for Jet3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(20))?;
        for (&(nx, ny, na), v) in MULTI_INDICES.iter().zip(self.entries.iter()) {
            let mut key = String::from("d");
            key.extend(std::iter::repeat_n('x', nx as usize));
            key.extend(std::iter::repeat_n('y', ny as usize));
            key.extend(std::iter::repeat_n('a', na as usize));
            if key == "d" {
                key = "value".into();
            }
            map.serialize_entry(&key, v)?;
        }
        map.end()
    }
}

/// Symbolic partial derivatives of one expression, computed once and then
/// evaluated at as many points as needed.
#[derive(Debug, Clone)]
pub struct JetTable {
    exprs: Vec<Expr>,
}

impl JetTable {
    pub fn new(e: &Expr) -> Self {
        let mut exprs: Vec<Expr> = Vec::with_capacity(20);
        for (i, &(nx, ny, na)) in MULTI_INDICES.iter().enumerate() {
            if i == 0 {
                exprs.push(e.clone());
                continue;
            }
            // Differentiate the lower-order parent that is one step away.
            let (parent, var) = if nx > 0 {
                (slot(nx - 1, ny, na), Var::X)
            } else if ny > 0 {
                (slot(nx, ny - 1, na), Var::Y)
            } else {
                (slot(nx, ny, na - 1), Var::Alpha)
            };
            let d = exprs[parent].differentiate(var);
            exprs.push(d);
        }
        JetTable { exprs }
    }

    pub fn expr(&self, nx: u8, ny: u8, na: u8) -> &Expr {
        &self.exprs[slot(nx, ny, na)]
    }

    pub fn eval(&self, at: Coords) -> Result<Jet3, EvalError> {
        let mut entries = [0.0; 20];
        for (dst, e) in entries.iter_mut().zip(&self.exprs) {
            *dst = e.eval(at)?;
        }
        Ok(Jet3 { entries })
    }

    /// Evaluates partials up to `max_order` only; higher entries are left at zero.
    pub fn eval_order(&self, at: Coords, max_order: u8) -> Result<Jet3, EvalError> {
        let count = match max_order {
            0 => 1,
            1 => 4,
            2 => 10,
            _ => 20,
        };
        let mut entries = [0.0; 20];
        for (dst, e) in entries.iter_mut().zip(&self.exprs).take(count) {
            *dst = e.eval(at)?;
        }
        Ok(Jet3 { entries })
    }

    /// Evaluates only the value and first partials, which is what the flow
    /// and Newton iterations need.
    pub fn eval_first(&self, at: Coords) -> Result<[f64; 4], EvalError> {
        Ok([
            self.exprs[0].eval(at)?,
            self.exprs[1].eval(at)?,
            self.exprs[2].eval(at)?,
            self.exprs[3].eval(at)?,
        ])
    }

    pub fn value(&self, at: Coords) -> Result<f64, EvalError> {
        self.exprs[0].eval(at)
    }
}

/// Jet of `e` at `at`. For repeated evaluation build a [`JetTable`] instead.
pub fn jet3(e: &Expr, at: Coords) -> Result<Jet3, EvalError> {
    JetTable::new(e).eval(at)
}
