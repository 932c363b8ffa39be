use std::fs::File;
use std::io::{self, Read, Seek, SeekFrom};
use std::ops::Range;
use std::sync::Mutex;

/// Random-access byte source a Parquet footer can be read from.
///
/// Callers hand in local files, in-memory buffers, or their own adapters
/// (object stores, caches). Readers issue a handful of positioned reads and
/// never need the whole file.
pub trait ByteSource {
    fn len(&self) -> io::Result<u64>;

    /// Fill `buf` with the bytes starting at `offset`.
    fn read_exact_at(&self, offset: u64, buf: &mut [u8]) -> io::Result<()>;

    fn is_empty(&self) -> io::Result<bool> {
        Ok(self.len()? == 0)
    }
}

impl ByteSource for File {
    fn len(&self) -> io::Result<u64> {
        Ok(self.metadata()?.len())
    }

    fn read_exact_at(&self, offset: u64, buf: &mut [u8]) -> io::Result<()> {
        let mut handle = self;
        handle.seek(SeekFrom::Start(offset))?;
        handle.read_exact(buf)
    }
}

impl ByteSource for [u8] {
    fn len(&self) -> io::Result<u64> {
        Ok(<[u8]>::len(self) as u64)
    }

    fn read_exact_at(&self, offset: u64, buf: &mut [u8]) -> io::Result<()> {
        let start =
            usize::try_from(offset).map_err(|_| io::Error::new(io::ErrorKind::UnexpectedEof, "offset out of range"))?;
        let end = start
            .checked_add(buf.len())
            .filter(|end| *end <= <[u8]>::len(self))
            .ok_or_else(|| io::Error::new(io::ErrorKind::UnexpectedEof, "read past end of buffer"))?;
        buf.copy_from_slice(&self[start..end]);
        Ok(())
    }
}

impl ByteSource for Vec<u8> {
    fn len(&self) -> io::Result<u64> {
        Ok(self.as_slice().len() as u64)
    }

    fn read_exact_at(&self, offset: u64, buf: &mut [u8]) -> io::Result<()> {
        self.as_slice().read_exact_at(offset, buf)
    }
}

impl<S: ByteSource + ?Sized> ByteSource for &S {
    fn len(&self) -> io::Result<u64> {
        (**self).len()
    }

    fn read_exact_at(&self, offset: u64, buf: &mut [u8]) -> io::Result<()> {
        (**self).read_exact_at(offset, buf)
    }
}

impl<S: ByteSource + ?Sized> ByteSource for Box<S> {
    fn len(&self) -> io::Result<u64> {
        (**self).len()
    }

    fn read_exact_at(&self, offset: u64, buf: &mut [u8]) -> io::Result<()> {
        (**self).read_exact_at(offset, buf)
    }
}

/// Wraps a source and records every byte range read through it.
///
/// Used to audit that estimation touches nothing but the footer.
#[derive(Debug)]
pub struct RecordingSource<S> {
    inner: S,
    reads: Mutex<Vec<Range<u64>>>,
}

impl<S: ByteSource> RecordingSource<S> {
    pub fn new(inner: S) -> Self {
        Self { inner, reads: Mutex::new(Vec::new()) }
    }

    pub fn reads(&self) -> Vec<Range<u64>> {
        self.reads.lock().expect("read log poisoned").clone()
    }

    pub fn bytes_read(&self) -> u64 {
        self.reads().iter().map(|r| r.end - r.start).sum()
    }

    pub fn into_inner(self) -> S {
        self.inner
    }
}

impl<S: ByteSource> ByteSource for RecordingSource<S> {
    fn len(&self) -> io::Result<u64> {
        self.inner.len()
    }

    fn read_exact_at(&self, offset: u64, buf: &mut [u8]) -> io::Result<()> {
        self.reads.lock().expect("read log poisoned").push(offset..offset + buf.len() as u64);
        self.inner.read_exact_at(offset, buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_reads_are_bounds_checked() {
        let data: Vec<u8> = (0u8..16).collect();
        let mut buf = [0u8; 4];
        data.read_exact_at(12, &mut buf).unwrap();
        assert_eq!(buf, [12, 13, 14, 15]);
        assert!(data.read_exact_at(13, &mut buf).is_err());
        assert!(data.read_exact_at(u64::MAX, &mut buf).is_err());
    }

    #[test]
    fn recording_source_logs_ranges() {
        let data = vec![0u8; 100];
        let rec = RecordingSource::new(data);
        let mut buf = [0u8; 8];
        rec.read_exact_at(92, &mut buf).unwrap();
        rec.read_exact_at(10, &mut buf[..2]).unwrap();
        assert_eq!(rec.reads(), vec![92..100, 10..12]);
        assert_eq!(rec.bytes_read(), 10);
    }
}
