//! Block-granular buffered file access with transfer accounting. Every
//! buffer fill or flush counts as one block, whether full or not.

use std::cell::Cell;
use std::fs::File;
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::Path;

#[derive(Debug, Default)]
pub(crate) struct IoCounter {
    read: Cell<u64>,
    written: Cell<u64>,
}

impl IoCounter {
    pub(crate) fn blocks_read(&self) -> u64 {
        self.read.get()
    }

    pub(crate) fn blocks_written(&self) -> u64 {
        self.written.get()
    }
}

pub(crate) struct BlockWriter<'a> {
    file: File,
    buf: Vec<u8>,
    block: usize,
    io: &'a IoCounter,
}

impl<'a> BlockWriter<'a> {
    pub(crate) fn create(path: &Path, block: usize, io: &'a IoCounter) -> io::Result<Self> {
        Ok(Self {
            file: File::create(path)?,
            buf: Vec::with_capacity(block),
            block,
            io,
        })
    }

    pub(crate) fn write_record(&mut self, mut rec: &[u8]) -> io::Result<()> {
        while !rec.is_empty() {
            let take = (self.block - self.buf.len()).min(rec.len());
            self.buf.extend_from_slice(&rec[..take]);
            rec = &rec[take..];
            if self.buf.len() == self.block {
                self.flush_block()?;
            }
        }
        Ok(())
    }

    fn flush_block(&mut self) -> io::Result<()> {
        if !self.buf.is_empty() {
            self.file.write_all(&self.buf)?;
            self.io.written.set(self.io.written.get() + 1);
            self.buf.clear();
        }
        Ok(())
    }

    pub(crate) fn finish(mut self) -> io::Result<()> {
        self.flush_block()?;
        self.file.flush()
    }
}

pub(crate) struct BlockReader<'a> {
    file: File,
    buf: Vec<u8>,
    pos: usize,
    len: usize,
    /// Bytes still allowed to be read; `None` reads to end of file.
    remaining: Option<u64>,
    io: &'a IoCounter,
}

impl<'a> BlockReader<'a> {
    pub(crate) fn open(path: &Path, block: usize, io: &'a IoCounter) -> io::Result<Self> {
        Ok(Self {
            file: File::open(path)?,
            buf: vec![0; block],
            pos: 0,
            len: 0,
            remaining: None,
            io,
        })
    }

    /// Reads `len` bytes starting at byte `offset`.
    pub(crate) fn open_range(
        path: &Path,
        offset: u64,
        len: u64,
        block: usize,
        io: &'a IoCounter,
    ) -> io::Result<Self> {
        let mut file = File::open(path)?;
        file.seek(SeekFrom::Start(offset))?;
        Ok(Self {
            file,
            buf: vec![0; block],
            pos: 0,
            len: 0,
            remaining: Some(len),
            io,
        })
    }

    fn fill(&mut self) -> io::Result<()> {
        let want = match self.remaining {
            Some(r) => (r as usize).min(self.buf.len()),
            None => self.buf.len(),
        };
        let mut got = 0;
        while got < want {
            let n = self.file.read(&mut self.buf[got..want])?;
            if n == 0 {
                break;
            }
            got += n;
        }
        if got > 0 {
            self.io.read.set(self.io.read.get() + 1);
        }
        if let Some(r) = self.remaining.as_mut() {
            *r -= got as u64;
        }
        self.pos = 0;
        self.len = got;
        Ok(())
    }

    /// Fills `out` with the next record. `Ok(false)` at a clean end of input.
    pub(crate) fn read_record(&mut self, out: &mut [u8]) -> io::Result<bool> {
        let mut filled = 0;
        while filled < out.len() {
            if self.pos == self.len {
                self.fill()?;
                if self.len == 0 {
                    if filled == 0 {
                        return Ok(false);
                    }
                    return Err(io::Error::new(
                        io::ErrorKind::UnexpectedEof,
                        "truncated record",
                    ));
                }
            }
            let take = (self.len - self.pos).min(out.len() - filled);
            out[filled..filled + take].copy_from_slice(&self.buf[self.pos..self.pos + take]);
            self.pos += take;
            filled += take;
        }
        Ok(true)
    }

    /// Reads up to `max` bytes of whole records into `out`, returning the
    /// byte count.
    pub(crate) fn read_records(
        &mut self,
        out: &mut Vec<u8>,
        width: usize,
        max: usize,
    ) -> io::Result<usize> {
        out.clear();
        let mut rec = vec![0u8; width];
        while out.len() + width <= max {
            if !self.read_record(&mut rec)? {
                break;
            }
            out.extend_from_slice(&rec);
        }
        Ok(out.len())
    }
}

pub(crate) fn encode_pair(a: u64, b: u64) -> [u8; 16] {
    let mut rec = [0u8; 16];
    rec[..8].copy_from_slice(&a.to_be_bytes());
    rec[8..].copy_from_slice(&b.to_be_bytes());
    rec
}

pub(crate) fn decode_pair(rec: &[u8; 16]) -> (u64, u64) {
    let a = u64::from_be_bytes(rec[..8].try_into().expect("8 bytes"));
    let b = u64::from_be_bytes(rec[8..].try_into().expect("8 bytes"));
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_straddle_blocks() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("recs");
        let io = IoCounter::default();
        let mut w = BlockWriter::create(&path, 24, &io).unwrap();
        for i in 0..10u64 {
            w.write_record(&encode_pair(i, i * 3)).unwrap();
        }
        w.finish().unwrap();
        // 160 bytes in 24-byte blocks
        assert_eq!(io.blocks_written(), 7);

        let mut r = BlockReader::open(&path, 24, &io).unwrap();
        let mut rec = [0u8; 16];
        let mut seen = Vec::new();
        while r.read_record(&mut rec).unwrap() {
            seen.push(decode_pair(&rec));
        }
        assert_eq!(seen, (0..10u64).map(|i| (i, i * 3)).collect::<Vec<_>>());
        assert_eq!(io.blocks_read(), 7);

        let mut r = BlockReader::open_range(&path, 32, 32, 24, &io).unwrap();
        assert!(r.read_record(&mut rec).unwrap());
        assert_eq!(decode_pair(&rec), (2, 6));
        assert!(r.read_record(&mut rec).unwrap());
        assert!(!r.read_record(&mut rec).unwrap());
    }

    #[test]
    fn big_endian_orders_bytes_like_numbers() {
        assert!(encode_pair(1, 0) < encode_pair(256, 0));
        assert!(encode_pair(3, 9) < encode_pair(3, 10));
    }
}
