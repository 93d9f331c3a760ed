#include <zlib.h>

#include <cstdio>
#include <iterator>

#include <spdlog/spdlog.h>

#include "smartbag/store/document_store.hpp"

namespace smartbag::store {
namespace {

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t n) {
  return static_cast<std::uint32_t>(::crc32(::crc32(0L, Z_NULL, 0), data, static_cast<uInt>(n)));
}

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

// Decodes one payload; nullopt if it is structurally malformed.
std::optional<LogRecord> decode_payload(const std::uint8_t* p, std::size_t n) {
  std::size_t pos = 0;
  auto need = [&](std::size_t k) { return n - pos >= k; };
  if (!need(3)) return std::nullopt;
  LogRecord r;
  r.op = static_cast<LogRecord::Op>(p[pos++]);
  if (r.op != LogRecord::Op::Patch && r.op != LogRecord::Op::Append) return std::nullopt;
  const auto path_len = static_cast<std::size_t>(get_le(p + pos, 2));
  pos += 2;
  if (!need(path_len)) return std::nullopt;
  r.path.assign(reinterpret_cast<const char*>(p + pos), path_len);
  pos += path_len;
  if (r.op == LogRecord::Op::Append) {
    if (!need(2)) return std::nullopt;
    const auto id_len = static_cast<std::size_t>(get_le(p + pos, 2));
    pos += 2;
    if (!need(id_len + 8)) return std::nullopt;
    r.id.assign(reinterpret_cast<const char*>(p + pos), id_len);
    pos += id_len;
    r.recv_ts = static_cast<std::int64_t>(get_le(p + pos, 8));
    pos += 8;
  }
  r.doc = json::parse(p + pos, p + n, nullptr, false);
  if (r.doc.is_discarded()) return std::nullopt;
  return r;
}

}  // namespace

std::string PushId::str() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%013lld-%06u", static_cast<long long>(millis), counter);
  return buf;
}

std::optional<PushId> PushId::parse(std::string_view text) {
  if (text.size() != 20 || text[13] != '-') return std::nullopt;
  PushId id;
  for (std::size_t i = 0; i < 20; ++i) {
    if (i == 13) continue;
    if (text[i] < '0' || text[i] > '9') return std::nullopt;
    if (i < 13)
      id.millis = id.millis * 10 + (text[i] - '0');
    else
      id.counter = id.counter * 10 + static_cast<std::uint32_t>(text[i] - '0');
  }
  return id;
}

std::vector<std::uint8_t> encode_record(const LogRecord& record) {
  std::vector<std::uint8_t> payload;
  payload.push_back(static_cast<std::uint8_t>(record.op));
  put_le(payload, record.path.size(), 2);
  payload.insert(payload.end(), record.path.begin(), record.path.end());
  if (record.op == LogRecord::Op::Append) {
    put_le(payload, record.id.size(), 2);
    payload.insert(payload.end(), record.id.begin(), record.id.end());
    put_le(payload, static_cast<std::uint64_t>(record.recv_ts), 8);
  }
  const std::string text = record.doc.dump();
  payload.insert(payload.end(), text.begin(), text.end());

  std::vector<std::uint8_t> out;
  out.reserve(payload.size() + 8);
  put_le(out, payload.size(), 4);
  out.insert(out.end(), payload.begin(), payload.end());
  put_le(out, crc32_of(payload.data(), payload.size()), 4);
  return out;
}

ReplayResult replay_log(std::istream& log) {
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(log)),
                                        std::istreambuf_iterator<char>());
  ReplayResult out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 4) {
      out.truncated_tail = true;
      break;
    }
    const auto len = static_cast<std::size_t>(get_le(bytes.data() + pos, 4));
    if (bytes.size() - pos - 4 < len + 4) {
      out.truncated_tail = true;
      break;
    }
    const std::uint8_t* payload = bytes.data() + pos + 4;
    const auto stored_crc = static_cast<std::uint32_t>(get_le(payload + len, 4));
    auto record = stored_crc == crc32_of(payload, len) ? decode_payload(payload, len) : std::nullopt;
    std::optional<StorePath> path;
    if (record) path = StorePath::parse(record->path);
    if (!record || !path) {
      spdlog::warn("store log: corrupt record at byte {}, replay stops with {} records", pos,
                   out.records);
      out.corrupt = true;
      break;
    }
    try {
      if (record->op == LogRecord::Op::Patch) {
        apply_patch(out.state, *path, record->doc);
      } else {
        if (auto id = PushId::parse(record->id); id && (!out.last_id || *id > *out.last_id))
          out.last_id = id;
        apply_append(out.state, *path, {record->id, record->recv_ts, std::move(record->doc)});
      }
    } catch (const StoreError& e) {
      spdlog::warn("store log: unusable record at byte {}: {}", pos, e.what());
      out.corrupt = true;
      break;
    }
    ++out.records;
    pos += 8 + len;
    out.valid_bytes = pos;
  }
  return out;
}

}  // namespace smartbag::store
