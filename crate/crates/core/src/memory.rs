//! Main data memory behind a single 32-bit port, the load/store unit that
//! moves vectors between it and the scratchpads, and memory image formats.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

pub const DEFAULT_DATA_MEMORY: u32 = 1 << 20;
pub const DEFAULT_PROGRAM_MEMORY: u32 = 64 << 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MemFault {
    #[error("address {addr:#010x} (+{len} bytes) outside memory of {size} bytes")]
    OutOfRange { addr: u32, len: u32, size: u32 },
    #[error("misaligned {width}-bit access at {addr:#010x}")]
    Misaligned { addr: u32, width: u32 },
    #[error("unsupported access width {0}")]
    BadWidth(u32),
}

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("line {line}: `{text}` is not a hex word")]
    BadHex { line: usize, text: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Fault(#[from] MemFault),
}

/// Byte-addressed little-endian data memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MainMemory {
    bytes: Vec<u8>,
    port_words: u64,
}

impl MainMemory {
    pub fn new(size: u32) -> Self {
        MainMemory { bytes: vec![0; size as usize], port_words: 0 }
    }

    pub fn size(&self) -> u32 {
        self.bytes.len() as u32
    }

    /// Words moved through the data port so far.
    pub fn port_words(&self) -> u64 {
        self.port_words
    }

    fn check(&self, addr: u32, len: u32) -> Result<usize, MemFault> {
        let end = addr as u64 + len as u64;
        if end > self.bytes.len() as u64 {
            return Err(MemFault::OutOfRange { addr, len, size: self.size() });
        }
        Ok(addr as usize)
    }

    fn check_access(&self, addr: u32, width: u32) -> Result<usize, MemFault> {
        if !matches!(width, 8 | 16 | 32) {
            return Err(MemFault::BadWidth(width));
        }
        let bytes = width / 8;
        if addr % bytes != 0 {
            return Err(MemFault::Misaligned { addr, width });
        }
        self.check(addr, bytes)
    }

    /// Zero-extended little-endian read through the port.
    pub fn read(&mut self, addr: u32, width: u32) -> Result<u32, MemFault> {
        let v = self.peek(addr, width)?;
        self.port_words += 1;
        Ok(v)
    }

    /// Little-endian write through the port.
    pub fn write(&mut self, addr: u32, width: u32, value: u32) -> Result<(), MemFault> {
        self.poke(addr, width, value)?;
        self.port_words += 1;
        Ok(())
    }

    /// Read without counting port traffic.
    pub fn peek(&self, addr: u32, width: u32) -> Result<u32, MemFault> {
        let a = self.check_access(addr, width)?;
        let n = (width / 8) as usize;
        let mut buf = [0u8; 4];
        buf[..n].copy_from_slice(&self.bytes[a..a + n]);
        Ok(u32::from_le_bytes(buf))
    }

    /// Write without counting port traffic.
    pub fn poke(&mut self, addr: u32, width: u32, value: u32) -> Result<(), MemFault> {
        let a = self.check_access(addr, width)?;
        let n = (width / 8) as usize;
        self.bytes[a..a + n].copy_from_slice(&value.to_le_bytes()[..n]);
        Ok(())
    }

    pub fn peek_words(&self, addr: u32, count: usize) -> Result<Vec<u32>, MemFault> {
        (0..count).map(|k| self.peek(addr + 4 * k as u32, 32)).collect()
    }

    pub fn poke_words(&mut self, addr: u32, words: &[u32]) -> Result<(), MemFault> {
        for (k, w) in words.iter().enumerate() {
            self.poke(addr + 4 * k as u32, 32, *w)?;
        }
        Ok(())
    }

    /// Block read for a vector transfer; counts `ceil(len/4)` port words.
    pub fn read_block(&mut self, addr: u32, len: u32) -> Result<&[u8], MemFault> {
        let a = self.check(addr, len)?;
        self.port_words += len.div_ceil(4) as u64;
        Ok(&self.bytes[a..a + len as usize])
    }

    /// Block write for a vector transfer; counts `ceil(len/4)` port words.
    pub fn write_block(&mut self, addr: u32, data: &[u8]) -> Result<(), MemFault> {
        let a = self.check(addr, data.len() as u32)?;
        self.bytes[a..a + data.len()].copy_from_slice(data);
        self.port_words += (data.len() as u32).div_ceil(4) as u64;
        Ok(())
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Copies a raw binary image to `base`.
    pub fn load_raw(&mut self, base: u32, image: &[u8]) -> Result<(), MemFault> {
        let a = self.check(base, image.len() as u32)?;
        self.bytes[a..a + image.len()].copy_from_slice(image);
        Ok(())
    }

    pub fn dump_raw(&self, base: u32, len: u32) -> Result<Vec<u8>, MemFault> {
        let a = self.check(base, len)?;
        Ok(self.bytes[a..a + len as usize].to_vec())
    }

    pub fn load_raw_file(&mut self, base: u32, path: &Path) -> Result<(), ImageError> {
        let data = std::fs::read(path)
            .map_err(|source| ImageError::Io { path: path.display().to_string(), source })?;
        Ok(self.load_raw(base, &data)?)
    }

    pub fn load_hex(&mut self, base: u32, text: &str) -> Result<usize, ImageError> {
        let words = parse_hex_words(text)?;
        self.poke_words(base, &words)?;
        Ok(words.len())
    }
}

/// One-cycle-per-word transfer through the 32-bit port after a fixed setup.
pub fn transfer_cycles(bytes: u32, initial_latency: u32) -> u64 {
    initial_latency as u64 + bytes.div_ceil(4) as u64
}

/// Occupancy of the single load/store unit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LsuState {
    pub busy_until: u64,
    /// First cycle of the in-flight transfer's word phase; the port is free
    /// before it.
    pub port_from: u64,
    pub active_hart: Option<u8>,
    pub port_traffic: u64,
    pub busy_cycles: u64,
}

impl LsuState {
    pub fn busy(&self, now: u64) -> bool {
        now < self.busy_until
    }

    /// Whether the data port moves a transfer word in cycle `now`.
    pub fn port_busy(&self, now: u64) -> bool {
        now >= self.port_from && now < self.busy_until
    }

    pub fn start_transfer(&mut self, hart: u8, now: u64, bytes: u32, initial_latency: u32) -> u64 {
        debug_assert!(!self.busy(now), "one vector transfer in flight at a time");
        let cycles = transfer_cycles(bytes, initial_latency);
        self.busy_until = now + cycles;
        self.port_from = now + initial_latency as u64;
        self.active_hart = Some(hart);
        self.port_traffic += bytes.div_ceil(4) as u64;
        self.busy_cycles += cycles;
        cycles
    }

    pub fn scalar_access(&mut self) {
        self.port_traffic += 1;
    }
}

/// Parses one hex word per line; blank lines and `#` comments are skipped,
/// an optional `0x` prefix is accepted.
pub fn parse_hex_words(text: &str) -> Result<Vec<u32>, ImageError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let t = raw.split('#').next().unwrap_or("").trim();
        if t.is_empty() {
            continue;
        }
        let digits = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
        let w = u32::from_str_radix(digits, 16)
            .map_err(|_| ImageError::BadHex { line: n + 1, text: t.to_string() })?;
        out.push(w);
    }
    Ok(out)
}

/// Eight lowercase hex digits per line.
pub fn format_hex_words(words: &[u32]) -> String {
    let mut s = String::with_capacity(words.len() * 9);
    for w in words {
        let _ = writeln!(s, "{w:08x}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_initialized() {
        let mut m = MainMemory::new(64);
        assert_eq!(m.read(0, 32).unwrap(), 0);
    }

    #[test]
    fn little_endian_bytes() {
        let mut m = MainMemory::new(64);
        m.write(0x10, 32, 0x1122_3344).unwrap();
        assert_eq!(m.read(0x10, 8).unwrap(), 0x44);
        assert_eq!(m.read(0x13, 8).unwrap(), 0x11);
        assert_eq!(m.read(0x12, 16).unwrap(), 0x1122);
        assert_eq!(m.read(0x10, 32).unwrap(), 0x1122_3344);
    }

    #[test]
    fn byte_write_changes_one_byte() {
        let mut m = MainMemory::new(64);
        m.write(0x20, 32, 0xAABB_CCDD).unwrap();
        m.write(0x21, 8, 0x00).unwrap();
        assert_eq!(m.read(0x20, 32).unwrap(), 0xAABB_00DD);
    }

    #[test]
    fn faults() {
        let mut m = MainMemory::new(64);
        assert_eq!(m.read(1, 16), Err(MemFault::Misaligned { addr: 1, width: 16 }));
        assert!(matches!(m.write(68, 32, 0), Err(MemFault::OutOfRange { .. })));
        assert!(matches!(m.read(64, 8), Err(MemFault::OutOfRange { .. })));
        assert!(m.read(u32::MAX - 3, 32).is_err());
    }

    #[test]
    fn port_traffic_counts() {
        let mut m = MainMemory::new(256);
        m.write(0, 32, 1).unwrap();
        m.read(0, 8).unwrap();
        m.read_block(0, 9).unwrap();
        m.write_block(16, &[0; 64]).unwrap();
        assert_eq!(m.port_words(), 2 + 3 + 16);
    }

    #[test]
    fn transfer_timing() {
        assert_eq!(transfer_cycles(64, 4), 20);
        assert_eq!(transfer_cycles(1, 4), 5);
        assert_eq!(transfer_cycles(128, 8), 40);
    }

    #[test]
    fn lsu_port_window() {
        let mut l = LsuState::default();
        let c = l.start_transfer(1, 10, 16, 4);
        assert_eq!(c, 8);
        assert!(l.busy(10) && l.busy(17) && !l.busy(18));
        assert!(!l.port_busy(13) && l.port_busy(14) && l.port_busy(17));
    }

    #[test]
    fn hex_round_trip() {
        let words = [0, 1, 0xdead_beef, u32::MAX];
        let text = format_hex_words(&words);
        assert_eq!(text.lines().next(), Some("00000000"));
        assert_eq!(parse_hex_words(&text).unwrap(), words);
        assert_eq!(parse_hex_words("# c\n0x10\n\n  ff  \n").unwrap(), vec![16, 255]);
        assert!(parse_hex_words("xyz").is_err());
    }

    #[test]
    fn raw_images() {
        let mut m = MainMemory::new(32);
        m.load_raw(4, &[1, 2, 3, 4]).unwrap();
        assert_eq!(m.peek(4, 32).unwrap(), 0x0403_0201);
        assert_eq!(m.dump_raw(4, 4).unwrap(), vec![1, 2, 3, 4]);
        assert!(m.load_raw(30, &[0; 4]).is_err());
        assert_eq!(m.port_words(), 0);
    }
}
