//! Published reference values used by the reproduction commands and the
//! acceptance suite.

/// Angles (θ0, θ1, θ0′, θ1′) with the published CHSH and CHSH_E at α = π/4.
pub struct ExtremalRow {
    pub angles: [f64; 4],
    pub chsh: f64,
    pub chsh_e: f64,
}

pub const TABLE1: [ExtremalRow; 4] = [
    ExtremalRow {
        angles: [2.070, 1.466, 1.372, 0.769],
        chsh: 2.248,
        chsh_e: 0.2369,
    },
    ExtremalRow {
        angles: [2.709, 2.106, 0.739, 0.125],
        chsh: 2.250,
        chsh_e: 0.2368,
    },
    ExtremalRow {
        angles: [1.316, 2.894, 1.033, 2.606],
        chsh: 2.828,
        chsh_e: -1.205,
    },
    ExtremalRow {
        angles: [2.050, 0.486, 1.877, 0.294],
        chsh: 2.828,
        chsh_e: -1.210,
    },
];

/// Zone fractions in percent at α = π/4, zones 1 to 4.
pub const TABLE2: [f64; 4] = [82.5, 1.4, 2.9, 13.2];

/// One setting evaluated under the three party assignments.
pub struct ClassRow {
    pub zone: u8,
    pub angles: [f64; 4],
    pub chsh: [f64; 3],
    pub chsh_e: [f64; 3],
}

pub const TABLE3: [ClassRow; 2] = [
    ClassRow {
        zone: 2,
        angles: [0.40, 3.02, 2.72, 2.38],
        chsh: [1.71, 1.71, 1.42],
        chsh_e: [0.11, 0.07, 0.18],
    },
    ClassRow {
        zone: 3,
        angles: [1.97, 1.31, 1.22, 0.83],
        chsh: [2.22, 2.07, 2.29],
        chsh_e: [0.15, 0.01, 0.17],
    },
];

pub const MAX_CHSH_E: f64 = 0.237;
pub const ZONE3_BOUNDARY: f64 = 2.561;
