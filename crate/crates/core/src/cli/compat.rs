use std::fmt;
use std::str::FromStr;

use crate::model::Variant;

/// Solution method selectable on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodTag {
    Dispatch,
    HeuristicGs,
    HeuristicLs,
    Ga,
}

impl MethodTag {
    pub const ALL: [MethodTag; 4] = [
        MethodTag::Dispatch,
        MethodTag::HeuristicGs,
        MethodTag::HeuristicLs,
        MethodTag::Ga,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodTag::Dispatch => "dispatch",
            MethodTag::HeuristicGs => "heuristic_gs",
            MethodTag::HeuristicLs => "heuristic_ls",
            MethodTag::Ga => "ga",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MethodTag::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                format!("unknown method {s:?} (expected dispatch, heuristic_gs, heuristic_ls or ga)")
            })
    }
}

/// A column of the method/variant table: a static variant or online arrivals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemClass {
    Static(Variant),
    Online,
}

impl ProblemClass {
    pub const ALL: [ProblemClass; 6] = [
        ProblemClass::Static(Variant::Jsp),
        ProblemClass::Static(Variant::Fsp),
        ProblemClass::Static(Variant::Fjsp),
        ProblemClass::Static(Variant::FjspSdst),
        ProblemClass::Static(Variant::Fajsp),
        ProblemClass::Online,
    ];
}

impl fmt::Display for ProblemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemClass::Static(v) => v.fmt(f),
            ProblemClass::Online => f.write_str("online"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    Supported,
    /// Works, but only with `--allow-extension`.
    Extension,
    Unsupported,
}

/// Which method handles which problem class.
///
/// Dispatching rules cover every static variant except setup times plus
/// online arrivals; setup times are reachable as an opt-in extension. The
/// load-balancing heuristics and the GA cover every static variant and no
/// online arrivals.
pub fn support(method: MethodTag, class: ProblemClass) -> Support {
    use ProblemClass::{Online, Static};
    match (method, class) {
        (MethodTag::Dispatch, Static(Variant::FjspSdst)) => Support::Extension,
        (MethodTag::Dispatch, _) => Support::Supported,
        (_, Online) => Support::Unsupported,
        (_, Static(_)) => Support::Supported,
    }
}

/// True when the combination may run, given the extension flag.
pub fn allowed(method: MethodTag, class: ProblemClass, allow_extension: bool) -> bool {
    match support(method, class) {
        Support::Supported => true,
        Support::Extension => allow_extension,
        Support::Unsupported => false,
    }
}
