#include <cstring>
#include <stdexcept>

#include "squfof/parallel.hpp"

namespace squfof {

namespace {

using Bytes = std::vector<std::uint8_t>;

void put_u32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

// sign byte (0 zero, 1 positive, 2 negative), 4-byte big-endian magnitude
// length, big-endian magnitude bytes.
void put_int(Bytes& out, const Int& v) {
  int sg = sgn(v);
  out.push_back(sg == 0 ? 0 : (sg > 0 ? 1 : 2));
  if (sg == 0) {
    put_u32(out, 0);
    return;
  }
  std::size_t count = 0;
  Int mag = abs(v);
  std::size_t nbytes = (mpz_sizeinbase(mag.get_mpz_t(), 2) + 7) / 8;
  put_u32(out, static_cast<std::uint32_t>(nbytes));
  std::size_t base = out.size();
  out.resize(base + nbytes);
  mpz_export(out.data() + base, &count, 1, 1, 1, 0, mag.get_mpz_t());
  if (count != nbytes) throw std::logic_error("wire: export size mismatch");
}

void put_long(Bytes& out, long v) { put_int(out, Int(static_cast<long>(v))); }

void put_form(Bytes& out, const QuadForm& f) {
  put_int(out, f.a);
  put_int(out, f.b);
  put_int(out, f.c);
}

struct Reader {
  const std::uint8_t* p;
  std::size_t len;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > len) throw std::runtime_error("wire: truncated frame");
  }
  std::uint8_t byte() {
    need(1);
    return p[pos++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = (std::uint32_t(p[pos]) << 24) |
                      (std::uint32_t(p[pos + 1]) << 16) |
                      (std::uint32_t(p[pos + 2]) << 8) |
                      std::uint32_t(p[pos + 3]);
    pos += 4;
    return v;
  }
  Int integer() {
    std::uint8_t sg = byte();
    if (sg > 2) throw std::runtime_error("wire: bad sign byte");
    std::uint32_t n = u32();
    if (sg == 0) {
      if (n != 0) throw std::runtime_error("wire: nonzero zero length");
      return 0;
    }
    need(n);
    Int mag;
    mpz_import(mag.get_mpz_t(), n, 1, 1, 1, 0, p + pos);
    pos += n;
    return sg == 2 ? Int(-mag) : mag;
  }
  long integer_long() {
    Int v = integer();
    if (!v.fits_slong_p()) throw std::runtime_error("wire: count overflow");
    return v.get_si();
  }
  QuadForm form() {
    Int a = integer();
    Int b = integer();
    Int c = integer();
    return QuadForm(a, b, c);
  }
};

}  // namespace

std::vector<std::uint8_t> encode_frame(const WorkerMessage& m) {
  Bytes payload;
  payload.push_back(static_cast<std::uint8_t>(m.kind));
  switch (m.kind) {
    case WorkerMessage::Kind::assign: {
      put_long(payload, m.segment.seq);
      put_form(payload, m.segment.F_start);
      put_form(payload, m.segment.F_end);
      put_form(payload, m.segment.F_rootS);
      put_u32(payload, static_cast<std::uint32_t>(m.segment.ladder.size()));
      for (const auto& f : m.segment.ladder) put_form(payload, f);
      break;
    }
    case WorkerMessage::Kind::factor_found: {
      put_int(payload, m.report.n);
      put_int(payload, m.report.factor_small);
      put_int(payload, m.report.factor_large);
      payload.push_back(static_cast<std::uint8_t>(m.report.method));
      put_long(payload, m.report.forward_steps);
      put_long(payload, m.report.reverse_steps);
      put_long(payload, m.report.squares_tested);
      put_long(payload, m.report.multiplier);
      break;
    }
    case WorkerMessage::Kind::segment_exhausted:
      put_long(payload, m.seq);
      put_long(payload, m.steps);
      put_long(payload, m.squares);
      break;
    case WorkerMessage::Kind::shutdown:
      break;
    default:
      throw std::invalid_argument("wire: unknown message kind");
  }
  Bytes out;
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::pair<WorkerMessage, std::size_t> decode_frame(const std::uint8_t* data,
                                                   std::size_t len) {
  Reader head{data, len};
  std::uint32_t plen = head.u32();
  if (4 + static_cast<std::size_t>(plen) > len)
    throw std::runtime_error("wire: truncated frame");
  Reader r{data + 4, plen};
  WorkerMessage m;
  std::uint8_t kind = r.byte();
  switch (kind) {
    case static_cast<std::uint8_t>(WorkerMessage::Kind::assign): {
      m.kind = WorkerMessage::Kind::assign;
      m.segment.seq = r.integer_long();
      m.segment.F_start = r.form();
      m.segment.F_end = r.form();
      m.segment.F_rootS = r.form();
      std::uint32_t n = r.u32();
      if (n > 64) throw std::runtime_error("wire: ladder too long");
      m.segment.ladder.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i)
        m.segment.ladder.push_back(r.form());
      break;
    }
    case static_cast<std::uint8_t>(WorkerMessage::Kind::factor_found): {
      m.kind = WorkerMessage::Kind::factor_found;
      m.report.n = r.integer();
      m.report.factor_small = r.integer();
      m.report.factor_large = r.integer();
      std::uint8_t meth = r.byte();
      if (meth > static_cast<std::uint8_t>(Method::perfect_square))
        throw std::runtime_error("wire: bad method tag");
      m.report.method = static_cast<Method>(meth);
      m.report.forward_steps = r.integer_long();
      m.report.reverse_steps = r.integer_long();
      m.report.squares_tested = r.integer_long();
      m.report.multiplier = static_cast<int>(r.integer_long());
      if (!m.report.valid())
        throw std::runtime_error("wire: invalid factor pair");
      break;
    }
    case static_cast<std::uint8_t>(WorkerMessage::Kind::segment_exhausted):
      m.kind = WorkerMessage::Kind::segment_exhausted;
      m.seq = r.integer_long();
      m.steps = r.integer_long();
      m.squares = r.integer_long();
      break;
    case static_cast<std::uint8_t>(WorkerMessage::Kind::shutdown):
      m.kind = WorkerMessage::Kind::shutdown;
      break;
    default:
      throw std::runtime_error("wire: unknown message kind");
  }
  if (r.pos != plen) throw std::runtime_error("wire: trailing bytes");
  return {std::move(m), 4 + static_cast<std::size_t>(plen)};
}

}  // namespace squfof
