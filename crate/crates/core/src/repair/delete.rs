use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::integrate::line_removal;
use super::{Candidate, Edit, Evaluator, PatchKind};

/// Snippets longer than this are not searched exhaustively.
pub const ORACLE_MAX_LINES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// Last line first.
    BottomUp,
    TopDown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loops {
    Single,
    /// Repeat passes until one accepts nothing.
    Multi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance {
    /// errors < best
    Strict,
    /// errors <= best
    NonStrict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeletionConfig {
    pub order: Order,
    pub loops: Loops,
    pub acceptance: Acceptance,
}

impl Default for DeletionConfig {
    fn default() -> Self {
        Self {
            order: Order::BottomUp,
            loops: Loops::Multi,
            acceptance: Acceptance::NonStrict,
        }
    }
}

const fn c(order: Order, loops: Loops, acceptance: Acceptance) -> DeletionConfig {
    DeletionConfig { order, loops, acceptance }
}

impl DeletionConfig {
    pub const ALL: [DeletionConfig; 8] = {
        use Acceptance::*;
        use Loops::*;
        use Order::*;
        [
            c(BottomUp, Multi, NonStrict),
            c(BottomUp, Multi, Strict),
            c(BottomUp, Single, NonStrict),
            c(BottomUp, Single, Strict),
            c(TopDown, Multi, NonStrict),
            c(TopDown, Multi, Strict),
            c(TopDown, Single, NonStrict),
            c(TopDown, Single, Strict),
        ]
    };
}

impl Order {
    pub fn as_str(self) -> &'static str {
        match self {
            Order::BottomUp => "bottom_up",
            Order::TopDown => "top_down",
        }
    }
}

impl Loops {
    pub fn as_str(self) -> &'static str {
        match self {
            Loops::Single => "single",
            Loops::Multi => "multi",
        }
    }
}

impl Acceptance {
    pub fn as_str(self) -> &'static str {
        match self {
            Acceptance::Strict => "strict",
            Acceptance::NonStrict => "non_strict",
        }
    }
}

macro_rules! parse_enum {
    ($t:ty, $($s:literal => $v:expr),+) => {
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($s => Ok($v),)+
                    other => Err(format!("unknown value {other:?} (expected one of: {})", [$($s),+].join(", "))),
                }
            }
        }
    };
}

parse_enum!(Order, "bottom_up" => Order::BottomUp, "top_down" => Order::TopDown);
parse_enum!(Loops, "single" => Loops::Single, "multi" => Loops::Multi);
parse_enum!(Acceptance, "strict" => Acceptance::Strict, "non_strict" => Acceptance::NonStrict);

impl fmt::Display for DeletionConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.order.as_str(), self.loops.as_str(), self.acceptance.as_str())
    }
}

impl FromStr for DeletionConfig {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split('/').collect();
        let [o, l, a] = parts.as_slice() else {
            return Err(format!("expected order/loops/acceptance, got {s:?}"));
        };
        Ok(Self {
            order: o.parse()?,
            loops: l.parse()?,
            acceptance: a.parse()?,
        })
    }
}

/// Line-deletion local search. Lines are the physical lines of the body at
/// entry; `deleted_lines` records their indices.
pub fn delete_lines(c: &mut Candidate, ev: &Evaluator, cfg: DeletionConfig) {
    let lines: Vec<String> = c.body.split('\n').map(str::to_string).collect();
    let mut kept = vec![true; lines.len()];
    let order: Vec<usize> = match cfg.order {
        Order::BottomUp => (0..lines.len()).rev().collect(),
        Order::TopDown => (0..lines.len()).collect(),
    };
    loop {
        let mut accepted = false;
        for &i in &order {
            if c.error_count == 0 {
                return;
            }
            if !kept[i] {
                continue;
            }
            let start: usize = (0..i).filter(|&j| kept[j]).map(|j| lines[j].len() + 1).sum();
            let (s, e) = line_removal(&c.body, start, start + lines[i].len());
            let trial = ev.trial(c, Edit::replace(&c.body, s, e, ""));
            let ok = match cfg.acceptance {
                Acceptance::Strict => trial.result.error_count < c.error_count,
                Acceptance::NonStrict => trial.result.error_count <= c.error_count,
            };
            if ok {
                c.commit(trial, PatchKind::DeleteLine, Some(i));
                c.deleted_lines.insert(i);
                kept[i] = false;
                accepted = true;
            }
        }
        if cfg.loops == Loops::Single || !accepted {
            return;
        }
    }
}

/// Fewest errors reachable by deleting any subset of the body's lines,
/// ignoring subsets that leave nothing but blank lines. `None` when the body
/// is longer than [`ORACLE_MAX_LINES`] or every subset is blank.
pub fn exhaustive_minimum(c: &Candidate, ev: &Evaluator) -> Option<usize> {
    let lines: Vec<&str> = c.body.split('\n').collect();
    if lines.len() > ORACLE_MAX_LINES {
        return None;
    }
    (0u32..1 << lines.len())
        .filter_map(|mask| {
            let body = lines
                .iter()
                .enumerate()
                .filter(|(j, _)| mask & (1 << j) != 0)
                .map(|(_, l)| *l)
                .collect::<Vec<_>>()
                .join("\n");
            (!body.trim().is_empty()).then(|| ev.errors(&c.imports, &body))
        })
        .min()
}
