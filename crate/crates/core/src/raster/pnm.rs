//! Netpbm codec: PBM (`P1`/`P4`), PGM (`P2`/`P5`) and PPM (`P3`/`P6`).
//!
//! Decoding accepts any whitespace and `#` comments allowed by the format.
//! Encoding always emits the canonical layout below, so that
//! `encode(decode(x)) == x` for every file this module writes:
//!
//! ```text
//! P5\n<width> <height>\n<maxval>\n<raster>
//! ```
//!
//! ASCII rasters put one image row per line with single spaces between
//! samples. Binary samples are one byte when `maxval < 256`, otherwise two
//! bytes big-endian.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PnmError {
    #[error("unsupported magic number {magic:?} at byte {offset}")]
    UnsupportedMagic { offset: usize, magic: String },
    #[error("malformed header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: &'static str },
    #[error("truncated raster at byte {offset}: expected {expected} samples, found {found}")]
    Truncated { offset: usize, expected: usize, found: usize },
    #[error("invalid sample at byte {offset}: {reason}")]
    InvalidSample { offset: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Ascii,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnmKind {
    BitmapAscii,
    GrayAscii,
    RgbAscii,
    BitmapBinary,
    GrayBinary,
    RgbBinary,
}

impl PnmKind {
    pub fn magic(self) -> &'static str {
        match self {
            PnmKind::BitmapAscii => "P1",
            PnmKind::GrayAscii => "P2",
            PnmKind::RgbAscii => "P3",
            PnmKind::BitmapBinary => "P4",
            PnmKind::GrayBinary => "P5",
            PnmKind::RgbBinary => "P6",
        }
    }

    fn from_magic(magic: &[u8]) -> Option<Self> {
        Some(match magic {
            b"P1" => PnmKind::BitmapAscii,
            b"P2" => PnmKind::GrayAscii,
            b"P3" => PnmKind::RgbAscii,
            b"P4" => PnmKind::BitmapBinary,
            b"P5" => PnmKind::GrayBinary,
            b"P6" => PnmKind::RgbBinary,
            _ => return None,
        })
    }

    pub fn channels(self) -> usize {
        match self {
            PnmKind::RgbAscii | PnmKind::RgbBinary => 3,
            _ => 1,
        }
    }

    pub fn is_bitmap(self) -> bool {
        matches!(self, PnmKind::BitmapAscii | PnmKind::BitmapBinary)
    }

    pub fn encoding(self) -> Encoding {
        match self {
            PnmKind::BitmapAscii | PnmKind::GrayAscii | PnmKind::RgbAscii => Encoding::Ascii,
            _ => Encoding::Binary,
        }
    }
}

/// Decoded Netpbm raster. Samples are interleaved per pixel; bitmap samples
/// are 1 for foreground (black ink) and 0 otherwise, with `maxval == 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netpbm {
    pub kind: PnmKind,
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_separators(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b.is_ascii_whitespace() || b == 0x0b {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn header_uint(&mut self, what: &'static str) -> Result<usize, PnmError> {
        self.skip_separators();
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(&b) = self.data.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(usize::from(b - b'0')))
                .ok_or(PnmError::MalformedHeader { offset: start, reason: "header value overflows" })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(PnmError::MalformedHeader { offset: start, reason: what });
        }
        Ok(value)
    }
}

impl Netpbm {
    pub fn decode(data: &[u8]) -> Result<Self, PnmError> {
        let magic = data.get(..2).ok_or(PnmError::MalformedHeader { offset: 0, reason: "missing magic number" })?;
        let kind = PnmKind::from_magic(magic).ok_or_else(|| PnmError::UnsupportedMagic {
            offset: 0,
            magic: String::from_utf8_lossy(magic).into_owned(),
        })?;
        let mut cur = Cursor { data, pos: 2 };
        if !data.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
            return Err(PnmError::MalformedHeader { offset: 2, reason: "expected whitespace after magic number" });
        }
        let width = cur.header_uint("expected width")?;
        let height = cur.header_uint("expected height")?;
        if width == 0 || height == 0 {
            return Err(PnmError::MalformedHeader { offset: cur.pos, reason: "zero image dimension" });
        }
        let maxval = if kind.is_bitmap() {
            1
        } else {
            cur.skip_separators();
            let at = cur.pos;
            let m = cur.header_uint("expected maxval")?;
            if m == 0 || m > 65535 {
                return Err(PnmError::MalformedHeader { offset: at, reason: "maxval must be in 1..=65535" });
            }
            m as u16
        };
        let count = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(kind.channels()))
            .ok_or(PnmError::MalformedHeader { offset: cur.pos, reason: "image too large" })?;

        let samples = match kind.encoding() {
            Encoding::Binary => {
                if !data.get(cur.pos).is_some_and(|b| b.is_ascii_whitespace()) {
                    return Err(PnmError::MalformedHeader {
                        offset: cur.pos,
                        reason: "expected single whitespace before raster",
                    });
                }
                let start = cur.pos + 1;
                decode_binary(&data[start..], start, kind, width, height, maxval, count)?
            }
            Encoding::Ascii => decode_ascii(&mut cur, kind, maxval, count)?,
        };
        Ok(Self { kind, width, height, maxval, samples })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut header = format!("{}\n{} {}\n", self.kind.magic(), self.width, self.height);
        if !self.kind.is_bitmap() {
            let _ = writeln!(header, "{}", self.maxval);
        }
        let mut out = header.into_bytes();
        let row_len = self.width * self.kind.channels();
        match self.kind {
            PnmKind::BitmapBinary => {
                for row in self.samples.chunks_exact(row_len) {
                    for byte in row.chunks(8) {
                        let mut b = 0u8;
                        for (i, &s) in byte.iter().enumerate() {
                            if s != 0 {
                                b |= 0x80 >> i;
                            }
                        }
                        out.push(b);
                    }
                }
            }
            PnmKind::GrayBinary | PnmKind::RgbBinary => {
                if self.maxval < 256 {
                    out.extend(self.samples.iter().map(|&s| s as u8));
                } else {
                    for &s in &self.samples {
                        out.extend_from_slice(&s.to_be_bytes());
                    }
                }
            }
            PnmKind::BitmapAscii | PnmKind::GrayAscii | PnmKind::RgbAscii => {
                let mut line = String::new();
                for row in self.samples.chunks_exact(row_len) {
                    line.clear();
                    for (i, s) in row.iter().enumerate() {
                        if i > 0 {
                            line.push(' ');
                        }
                        let _ = write!(line, "{s}");
                    }
                    line.push('\n');
                    out.extend_from_slice(line.as_bytes());
                }
            }
        }
        out
    }
}

fn decode_binary(
    raster: &[u8],
    offset: usize,
    kind: PnmKind,
    width: usize,
    height: usize,
    maxval: u16,
    count: usize,
) -> Result<Vec<u16>, PnmError> {
    if kind == PnmKind::BitmapBinary {
        let stride = width.div_ceil(8);
        let needed = stride * height;
        if raster.len() < needed {
            return Err(PnmError::Truncated { offset, expected: count, found: raster.len() / stride * width });
        }
        let mut out = Vec::with_capacity(count);
        for row in raster[..needed].chunks_exact(stride) {
            for x in 0..width {
                out.push(u16::from(row[x / 8] & (0x80 >> (x % 8)) != 0));
            }
        }
        return Ok(out);
    }
    let bytes_per = if maxval < 256 { 1 } else { 2 };
    if raster.len() < count * bytes_per {
        return Err(PnmError::Truncated { offset, expected: count, found: raster.len() / bytes_per });
    }
    let out: Vec<u16> = if bytes_per == 1 {
        raster[..count].iter().map(|&b| u16::from(b)).collect()
    } else {
        raster[..count * 2].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
    };
    if let Some(i) = out.iter().position(|&s| s > maxval) {
        return Err(PnmError::InvalidSample {
            offset: offset + i * bytes_per,
            reason: format!("sample {} exceeds maxval {maxval}", out[i]),
        });
    }
    Ok(out)
}

fn decode_ascii(cur: &mut Cursor<'_>, kind: PnmKind, maxval: u16, count: usize) -> Result<Vec<u16>, PnmError> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        cur.skip_separators();
        let start = cur.pos;
        let Some(&b) = cur.data.get(start) else {
            return Err(PnmError::Truncated { offset: start, expected: count, found: out.len() });
        };
        if kind == PnmKind::BitmapAscii {
            // plain PBM samples need no separators
            match b {
                b'0' | b'1' => out.push(u16::from(b - b'0')),
                _ => {
                    return Err(PnmError::InvalidSample {
                        offset: start,
                        reason: format!("expected 0 or 1, found {:?}", b as char),
                    })
                }
            }
            cur.pos += 1;
            continue;
        }
        if !b.is_ascii_digit() {
            return Err(PnmError::InvalidSample { offset: start, reason: format!("unexpected byte {:?}", b as char) });
        }
        let mut value: u32 = 0;
        while let Some(&d) = cur.data.get(cur.pos) {
            if !d.is_ascii_digit() {
                break;
            }
            value = value.saturating_mul(10).saturating_add(u32::from(d - b'0'));
            cur.pos += 1;
        }
        if value > u32::from(maxval) {
            return Err(PnmError::InvalidSample {
                offset: start,
                reason: format!("sample {value} exceeds maxval {maxval}"),
            });
        }
        out.push(value as u16);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{gray_from_netpbm, gray_to_netpbm, mask_from_netpbm, mask_to_netpbm};
    use proptest::prelude::*;

    #[test]
    fn binary_pgm_normalizes_by_maxval() {
        let mut bytes = b"P5 2 2 255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 128, 64]);
        let img = gray_from_netpbm(&Netpbm::decode(&bytes).unwrap()).unwrap();
        assert_eq!(img.data(), &[0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0]);
    }

    #[test]
    fn ascii_pgm_matches_binary() {
        let mut bin = b"P5 2 2 255\n".to_vec();
        bin.extend_from_slice(&[0, 255, 128, 64]);
        let ascii = b"P2\n# comment\n2 2\n255\n0 255\n128 64\n";
        let a = gray_from_netpbm(&Netpbm::decode(ascii).unwrap()).unwrap();
        let b = gray_from_netpbm(&Netpbm::decode(&bin).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn plain_pbm() {
        let mask = mask_from_netpbm(&Netpbm::decode(b"P1 2 1\n1 0\n").unwrap()).unwrap();
        assert_eq!(mask.data(), &[true, false]);
        // separators are optional in plain PBM
        let packed = mask_from_netpbm(&Netpbm::decode(b"P1\n3 1\n101").unwrap()).unwrap();
        assert_eq!(packed.data(), &[true, false, true]);
    }

    #[test]
    fn pgm_mask_binarizes_at_half() {
        let mask = mask_from_netpbm(&Netpbm::decode(b"P2 4 1 255\n0 255 127 128\n").unwrap()).unwrap();
        assert_eq!(mask.data(), &[false, true, false, true]);
    }

    #[test]
    fn errors_name_offsets() {
        assert_eq!(
            Netpbm::decode(b"P7 1 1 255\n\0"),
            Err(PnmError::UnsupportedMagic { offset: 0, magic: "P7".into() })
        );
        assert!(matches!(Netpbm::decode(b"P5 2 x 255\n"), Err(PnmError::MalformedHeader { offset: 5, .. })));
        assert!(matches!(
            Netpbm::decode(b"P5 2 2 255\n\x01\x02"),
            Err(PnmError::Truncated { offset: 11, expected: 4, found: 2 })
        ));
        assert!(matches!(Netpbm::decode(b"P5 1 1 70000\n\0"), Err(PnmError::MalformedHeader { offset: 7, .. })));
        assert!(matches!(Netpbm::decode(b"P2 2 1 10\n3 11\n"), Err(PnmError::InvalidSample { offset: 12, .. })));
        assert!(matches!(Netpbm::decode(b"P2 2 1 10\n3"), Err(PnmError::Truncated { expected: 2, found: 1, .. })));
        assert!(matches!(Netpbm::decode(b"P"), Err(PnmError::MalformedHeader { offset: 0, .. })));
    }

    #[test]
    fn sixteen_bit_samples_are_big_endian() {
        let mut bytes = b"P5\n2 1\n65535\n".to_vec();
        bytes.extend_from_slice(&[0x01, 0x00, 0xff, 0xff]);
        let pnm = Netpbm::decode(&bytes).unwrap();
        assert_eq!(pnm.samples, vec![256, 65535]);
        assert_eq!(pnm.encode(), bytes);
    }

    #[test]
    fn ppm_converted_to_luma() {
        let pnm = Netpbm::decode(b"P3 1 1 255\n255 0 0\n").unwrap();
        let img = gray_from_netpbm(&pnm).unwrap();
        assert!((img.get(0, 0) - 0.299).abs() < 1e-15);
    }

    fn gray_netpbm() -> impl Strategy<Value = Netpbm> {
        (1usize..20, 1usize..20, prop::sample::select(vec![1u16, 7, 255, 256, 4095, 65535]), any::<bool>())
            .prop_flat_map(|(w, h, maxval, ascii)| {
                prop::collection::vec(0..=maxval, w * h).prop_map(move |samples| Netpbm {
                    kind: if ascii { PnmKind::GrayAscii } else { PnmKind::GrayBinary },
                    width: w,
                    height: h,
                    maxval,
                    samples,
                })
            })
    }

    proptest! {
        #[test]
        fn gray_file_round_trip_is_bit_exact(pnm in gray_netpbm()) {
            let file = pnm.encode();
            let img = gray_from_netpbm(&Netpbm::decode(&file).unwrap()).unwrap();
            let again = gray_to_netpbm(&img, pnm.kind.encoding(), pnm.maxval).unwrap().encode();
            prop_assert_eq!(again, file);
        }

        #[test]
        fn mask_file_round_trip_is_bit_exact(w in 1usize..40, h in 1usize..40, ascii: bool, seed: u64) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mask = crate::BinaryMask::from_fn(w, h, |_, _| rng.random::<bool>()).unwrap_or_else(|_| unreachable!());
            let enc = if ascii { Encoding::Ascii } else { Encoding::Binary };
            let file = mask_to_netpbm(&mask, enc).encode();
            let back = mask_from_netpbm(&Netpbm::decode(&file).unwrap()).unwrap();
            prop_assert_eq!(&back, &mask);
            prop_assert_eq!(mask_to_netpbm(&back, enc).encode(), file);
        }
    }
}
