// Generated by tools/gen_constants.py; do not edit by hand.
// Value = (limbs as a big-endian 256-bit integer) * 2^EXP.

pub const TWO_OVER_PI_LIMBS: [u64; 4] = [
    0xa2f9836e4e441529,
    0xfc2757d1f534ddc0,
    0xdb6295993c439041,
    0xfe5163abdebbc561,
];
pub const TWO_OVER_PI_EXP: i32 = -256;
/// 0x1.45f306dc9c883p-1 + -0x1.6b01ec5417056p-55 + -0x1.6447e493ad4cep-109
pub const TWO_OVER_PI_F64: [u64; 3] = [
    0x3fe45f306dc9c883,
    0xbc86b01ec5417056,
    0xb926447e493ad4ce,
];

pub const PIO2_LIMBS: [u64; 4] = [
    0xc90fdaa22168c234,
    0xc4c6628b80dc1cd1,
    0x29024e088a67cc74,
    0x020bbea63b139b22,
];
pub const PIO2_EXP: i32 = -255;
/// 0x1.921fb54442d18p+0 + 0x1.1a62633145c07p-54 + -0x1.f1976b7ed8fbcp-110
pub const PIO2_F64: [u64; 3] = [
    0x3ff921fb54442d18,
    0x3c91a62633145c07,
    0xb91f1976b7ed8fbc,
];
