//! Bundled scenario files, addressable by name wherever a config path is accepted.

pub const FIG4_COMB4: &str = include_str!("../presets/fig4_comb4.cfg");
pub const FIG5_COMB12: &str = include_str!("../presets/fig5_comb12.cfg");
pub const TABLE1: &str = include_str!("../presets/table1.cfg");
pub const FIG6_ALLOC: &str = include_str!("../presets/fig6_alloc.cfg");

pub const ALL: [(&str, &str); 4] = [
    ("fig4_comb4", FIG4_COMB4),
    ("fig5_comb12", FIG5_COMB12),
    ("table1", TABLE1),
    ("fig6_alloc", FIG6_ALLOC),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
