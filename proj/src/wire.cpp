#include "lockstep/wire.hpp"

#include <string_view>

#include "lockstep/error.hpp"

namespace lockstep::wire {
namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void bytes(std::span<const std::uint8_t> b) {
    u32(static_cast<std::uint32_t>(b.size()));
    out_.insert(out_.end(), b.begin(), b.end());
  }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  std::vector<std::uint8_t> bytes() {
    const std::uint32_t n = u32();
    need(n);
    std::vector<std::uint8_t> out(in_.begin() + pos_, in_.begin() + pos_ + n);
    pos_ += n;
    return out;
  }
  void finish() const {
    if (pos_ != in_.size()) throw MalformedFrame("trailing bytes in payload");
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw MalformedFrame("truncated payload");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void put_record(Writer& w, const CommitRecord& r) {
  w.u64(r.seq);
  w.u32(r.pc);
  w.u32(r.raw);
  std::uint8_t flags = 0;
  if (r.reg_write) flags |= kFlagReg;
  if (r.mem_write) flags |= kFlagMem;
  if (r.halt) flags |= kFlagHalt;
  w.u8(flags);
  if (r.reg_write) {
    w.u8(r.reg_write->index);
    w.u32(r.reg_write->value);
  }
  if (r.mem_write) {
    w.u32(r.mem_write->addr);
    w.u8(r.mem_write->width);
    w.u32(r.mem_write->value);
  }
}

CommitRecord get_record(Reader& r) {
  CommitRecord rec;
  rec.seq = r.u64();
  rec.pc = r.u32();
  rec.raw = r.u32();
  const std::uint8_t flags = r.u8();
  if (flags & ~(kFlagReg | kFlagMem | kFlagHalt)) throw MalformedFrame("unknown commit flags");
  if (flags & kFlagReg) {
    isa::RegWrite w;
    w.index = r.u8();
    w.value = r.u32();
    if (w.index == 0 || w.index > 31) throw MalformedFrame("register write index out of range");
    rec.reg_write = w;
  }
  if (flags & kFlagMem) {
    isa::MemWrite w;
    w.addr = r.u32();
    w.width = r.u8();
    w.value = r.u32();
    if (w.width != 1 && w.width != 2 && w.width != 4) throw MalformedFrame("memory write width invalid");
    rec.mem_write = w;
  }
  rec.halt = (flags & kFlagHalt) != 0;
  return rec;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Fault fault_from(const SimError& e) {
  return Fault{static_cast<std::uint8_t>(e.kind()), e.pc(), e.raw(), e.detail()};
}

}  // namespace

Tag tag_of(const Message& m) {
  static constexpr Tag kTags[] = {Tag::Reset,   Tag::LoadImage, Tag::Step,   Tag::GetReg,   Tag::GetPc,
                                  Tag::GetMem,  Tag::Quit,      Tag::GetCsr, Tag::Commits, Tag::RegVal,
                                  Tag::PcVal,   Tag::MemBytes,  Tag::Ack,    Tag::Fault,   Tag::CsrVal};
  static_assert(std::size(kTags) == std::variant_size_v<Message>);
  return kTags[m.index()];
}

bool is_request(const Message& m) { return static_cast<std::uint8_t>(tag_of(m)) < 0x80; }

std::vector<std::uint8_t> encode(const Message& m) {
  Writer w;
  w.u32(0);  // patched below
  w.u8(static_cast<std::uint8_t>(tag_of(m)));
  std::visit(Overloaded{
                 [&](const Reset& x) { w.u32(x.entry_pc); },
                 [&](const LoadImage& x) {
                   w.u32(static_cast<std::uint32_t>(x.segments.size()));
                   for (const auto& s : x.segments) {
                     w.u32(s.base);
                     w.bytes(s.bytes);
                   }
                 },
                 [&](const Step& x) { w.u32(x.n); },
                 [&](const GetReg& x) { w.u8(x.index); },
                 [&](const GetPc&) {},
                 [&](const GetMem& x) {
                   w.u32(x.addr);
                   w.u32(x.len);
                 },
                 [&](const Quit&) {},
                 [&](const GetCsr& x) { w.u16(x.csr); },
                 [&](const Commits& x) {
                   w.u32(static_cast<std::uint32_t>(x.records.size()));
                   for (const auto& r : x.records) put_record(w, r);
                 },
                 [&](const RegVal& x) { w.u32(x.value); },
                 [&](const PcVal& x) { w.u32(x.value); },
                 [&](const MemBytes& x) { w.bytes(x.bytes); },
                 [&](const Ack&) {},
                 [&](const Fault& x) {
                   w.u8(x.kind);
                   w.u32(x.pc);
                   w.u32(x.raw);
                   w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(x.detail.data()), x.detail.size()));
                 },
                 [&](const CsrVal& x) { w.u64(x.value); },
             },
             m);
  auto& buf = w.buffer();
  const auto len = static_cast<std::uint32_t>(buf.size() - 4);
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<std::uint8_t>(len >> (8 * i));
  return std::move(buf);
}

Message decode(std::span<const std::uint8_t> frame) {
  if (frame.size() < 5) throw MalformedFrame("frame shorter than header");
  const std::uint32_t len = std::uint32_t{frame[0]} | (std::uint32_t{frame[1]} << 8) |
                            (std::uint32_t{frame[2]} << 16) | (std::uint32_t{frame[3]} << 24);
  if (len > kMaxFrame) throw MalformedFrame("frame length exceeds limit");
  if (len != frame.size() - 4) throw MalformedFrame("length field does not match frame size");
  const std::uint8_t tag = frame[4];
  Reader r(frame.subspan(5));
  Message m;
  switch (static_cast<Tag>(tag)) {
    case Tag::Reset: m = Reset{r.u32()}; break;
    case Tag::LoadImage: {
      LoadImage x;
      const std::uint32_t count = r.u32();
      // Each segment needs at least 8 bytes; bound count before reserving.
      if (count > len / 8) throw MalformedFrame("segment count exceeds payload");
      x.segments.reserve(count);
      for (std::uint32_t i = 0; i < count; ++i) {
        Segment s;
        s.base = r.u32();
        s.bytes = r.bytes();
        x.segments.push_back(std::move(s));
      }
      m = std::move(x);
      break;
    }
    case Tag::Step: m = Step{r.u32()}; break;
    case Tag::GetReg: {
      const std::uint8_t i = r.u8();
      if (i > 31) throw MalformedFrame("register index out of range");
      m = GetReg{i};
      break;
    }
    case Tag::GetPc: m = GetPc{}; break;
    case Tag::GetMem: {
      GetMem x;
      x.addr = r.u32();
      x.len = r.u32();
      m = x;
      break;
    }
    case Tag::Quit: m = Quit{}; break;
    case Tag::GetCsr: m = GetCsr{r.u16()}; break;
    case Tag::Commits: {
      Commits x;
      const std::uint32_t count = r.u32();
      if (count > len / 17) throw MalformedFrame("record count exceeds payload");
      x.records.reserve(count);
      for (std::uint32_t i = 0; i < count; ++i) x.records.push_back(get_record(r));
      m = std::move(x);
      break;
    }
    case Tag::RegVal: m = RegVal{r.u32()}; break;
    case Tag::PcVal: m = PcVal{r.u32()}; break;
    case Tag::MemBytes: m = MemBytes{r.bytes()}; break;
    case Tag::Ack: m = Ack{}; break;
    case Tag::Fault: {
      Fault x;
      x.kind = r.u8();
      x.pc = r.u32();
      x.raw = r.u32();
      auto text = r.bytes();
      x.detail.assign(text.begin(), text.end());
      m = std::move(x);
      break;
    }
    case Tag::CsrVal: m = CsrVal{r.u64()}; break;
    default:
      throw MalformedFrame("unknown tag " + std::to_string(tag));
  }
  r.finish();
  return m;
}

// Largest GetMem the server answers in one frame.
constexpr std::uint32_t kMaxMemRead = 16u << 20;

Message dispatch(Iss& iss, const Message& request) {
  try {
    return std::visit(
        Overloaded{
            [&](const Reset& x) -> Message {
              iss.reset(x.entry_pc);
              return Ack{};
            },
            [&](const LoadImage& x) -> Message {
              iss.load_image(MemoryImage{x.segments, 0});
              return Ack{};
            },
            [&](const Step& x) -> Message {
              if (x.n == 0) throw SimError(SimErrorKind::MalformedRequest, iss.read_pc(), 0, "step count must be >= 1");
              return Commits{iss.step(x.n)};
            },
            [&](const GetReg& x) -> Message { return RegVal{iss.read_reg(x.index)}; },
            [&](const GetPc&) -> Message { return PcVal{iss.read_pc()}; },
            [&](const GetMem& x) -> Message {
              if (x.len > kMaxMemRead) throw SimError(SimErrorKind::MalformedRequest, 0, 0, "memory read too large");
              return MemBytes{iss.read_mem(x.addr, x.len)};
            },
            [&](const Quit&) -> Message { return Ack{}; },
            [&](const GetCsr& x) -> Message { return CsrVal{iss.read_csr(static_cast<Csr>(x.csr))}; },
            [&](const auto&) -> Message {
              throw SimError(SimErrorKind::MalformedRequest, 0, 0, "response message sent as request");
            },
        },
        request);
  } catch (const SimError& e) {
    return fault_from(e);
  }
}

}  // namespace lockstep::wire
