//! Models and graphs shipped with the tool. Each file opens with comment lines
//! saying which values are given and which are reconstructed.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureKind {
    /// Model source text.
    Model,
    /// Weighted edge list (`src,dst,weight`).
    EdgeList,
}

#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub file_name: &'static str,
    pub kind: FixtureKind,
    pub source: &'static str,
}

impl Fixture {
    /// The leading comment block, without the `#` markers.
    pub fn notes(&self) -> String {
        self.source
            .lines()
            .map_while(|l| l.strip_prefix('#'))
            .map(|l| l.strip_prefix(' ').unwrap_or(l))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub const TWO_STOCK: Fixture = Fixture {
    name: "twostock",
    file_name: "twostock.sdm",
    kind: FixtureKind::Model,
    source: include_str!("../fixtures/twostock.sdm"),
};

pub const ARMS_RACE: Fixture = Fixture {
    name: "armsrace",
    file_name: "armsrace.sdm",
    kind: FixtureKind::Model,
    source: include_str!("../fixtures/armsrace.sdm"),
};

pub const STRONGEST_PATH_MISS: Fixture = Fixture {
    name: "strongest-path-miss",
    file_name: "strongest_path_miss.csv",
    kind: FixtureKind::EdgeList,
    source: include_str!("../fixtures/strongest_path_miss.csv"),
};

pub const ALL: [Fixture; 3] = [TWO_STOCK, ARMS_RACE, STRONGEST_PATH_MISS];

pub fn find(name: &str) -> Option<Fixture> {
    ALL.iter().find(|f| f.name == name || f.file_name == name).copied()
}
