#include "tokex/detail/merge_table.hpp"

#include <algorithm>

namespace tokex::detail {
namespace {

struct Candidate {
  std::int64_t priority;
  std::uint32_t left;  // node index == byte offset of the left symbol
  std::uint32_t right;
  TokenId left_id;
  TokenId right_id;
};

// Min-heap order: priority, then position.
struct Later {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.left > b.left;
  }
};

struct Scratch {
  std::vector<TokenId> ids;
  std::vector<std::int32_t> prev;
  std::vector<std::int32_t> next;
  std::vector<bool> alive;
  std::vector<Candidate> heap;
};

}  // namespace

void encode_chunk(const MergeTable& table, const ByteIds& byte_ids, std::string_view chunk,
                  std::vector<TokenId>& out) {
  const std::size_t n = chunk.size();
  if (n == 0) return;
  if (n == 1) {
    out.push_back(byte_ids[static_cast<unsigned char>(chunk[0])]);
    return;
  }

  thread_local Scratch s;
  s.ids.resize(n);
  s.prev.resize(n);
  s.next.resize(n);
  s.alive.assign(n, true);
  s.heap.clear();

  for (std::size_t i = 0; i < n; ++i) {
    s.ids[i] = byte_ids[static_cast<unsigned char>(chunk[i])];
    s.prev[i] = static_cast<std::int32_t>(i) - 1;
    s.next[i] = i + 1 < n ? static_cast<std::int32_t>(i + 1) : -1;
  }

  const auto push_pair = [&](std::int32_t l, std::int32_t r) {
    if (l < 0 || r < 0) return;
    if (const auto* e = table.find(s.ids[l], s.ids[r])) {
      s.heap.push_back({e->priority, static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(r),
                        s.ids[l], s.ids[r]});
      std::push_heap(s.heap.begin(), s.heap.end(), Later{});
    }
  };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    push_pair(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i + 1));
  }

  while (!s.heap.empty()) {
    std::pop_heap(s.heap.begin(), s.heap.end(), Later{});
    const Candidate c = s.heap.back();
    s.heap.pop_back();

    const auto l = static_cast<std::int32_t>(c.left);
    const auto r = static_cast<std::int32_t>(c.right);
    if (!s.alive[l] || !s.alive[r] || s.next[l] != r || s.ids[l] != c.left_id ||
        s.ids[r] != c.right_id) {
      continue;  // stale
    }

    s.ids[l] = table.find(c.left_id, c.right_id)->output;
    s.alive[r] = false;
    s.next[l] = s.next[r];
    if (s.next[r] >= 0) s.prev[s.next[r]] = l;

    push_pair(s.prev[l], l);
    push_pair(l, s.next[l]);
  }

  for (std::int32_t i = 0; i >= 0; i = s.next[i]) out.push_back(s.ids[i]);
}

}  // namespace tokex::detail
