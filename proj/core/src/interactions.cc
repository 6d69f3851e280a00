// Copyright 2026 The fairrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairrec/interactions.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fairrec/error.h"

namespace fairrec {

double LogScale(std::int64_t playcount) {
  if (playcount < 1) throw std::invalid_argument("LogScale: playcount must be >= 1");
  return std::log2(1.0 + static_cast<double>(playcount));
}

InteractionMatrix InteractionMatrix::Build(const FilteredCorpus& corpus) {
  if (corpus.records.empty()) throw PipelineError("matrix", "corpus is empty");
  std::vector<std::string> users, artists;
  for (const auto& r : corpus.records) {
    users.push_back(r.user_id);
    artists.push_back(r.artist_id);
  }
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  std::sort(artists.begin(), artists.end());
  artists.erase(std::unique(artists.begin(), artists.end()), artists.end());

  std::vector<Triple> triples;
  triples.reserve(corpus.records.size());
  auto index_of = [](const std::vector<std::string>& v, const std::string& key) {
    return static_cast<std::int32_t>(std::lower_bound(v.begin(), v.end(), key) - v.begin());
  };
  for (const auto& r : corpus.records) {
    triples.push_back({index_of(users, r.user_id), index_of(artists, r.artist_id), r.playcount});
  }
  return FromTriples(std::move(users), std::move(artists), std::move(triples));
}

InteractionMatrix InteractionMatrix::FromTriples(std::vector<std::string> user_ids,
                                                 std::vector<std::string> artist_ids,
                                                 std::vector<Triple> triples) {
  if (!std::is_sorted(user_ids.begin(), user_ids.end()) ||
      std::adjacent_find(user_ids.begin(), user_ids.end()) != user_ids.end() ||
      !std::is_sorted(artist_ids.begin(), artist_ids.end()) ||
      std::adjacent_find(artist_ids.begin(), artist_ids.end()) != artist_ids.end()) {
    throw std::invalid_argument("InteractionMatrix: ids must be sorted and unique");
  }
  InteractionMatrix m;
  m.user_ids_ = std::move(user_ids);
  m.artist_ids_ = std::move(artist_ids);
  const auto nu = m.user_ids_.size();
  const auto na = m.artist_ids_.size();
  for (const auto& t : triples) {
    if (t.user < 0 || static_cast<std::size_t>(t.user) >= nu || t.artist < 0 ||
        static_cast<std::size_t>(t.artist) >= na) {
      throw std::out_of_range("InteractionMatrix: triple index out of range");
    }
  }
  std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
    return std::tie(a.user, a.artist) < std::tie(b.user, b.artist);
  });
  for (std::size_t k = 1; k < triples.size(); ++k) {
    if (triples[k].user == triples[k - 1].user && triples[k].artist == triples[k - 1].artist) {
      throw std::invalid_argument("InteractionMatrix: duplicate (user, artist) entry");
    }
  }

  m.row_offsets_.assign(nu + 1, 0);
  m.entries_.reserve(triples.size());
  for (const auto& t : triples) {
    ++m.row_offsets_[static_cast<std::size_t>(t.user) + 1];
    m.entries_.push_back({t.artist, LogScale(t.playcount), t.playcount});
  }
  std::partial_sum(m.row_offsets_.begin(), m.row_offsets_.end(), m.row_offsets_.begin());

  m.col_offsets_.assign(na + 1, 0);
  for (const auto& t : triples) ++m.col_offsets_[static_cast<std::size_t>(t.artist) + 1];
  std::partial_sum(m.col_offsets_.begin(), m.col_offsets_.end(), m.col_offsets_.begin());
  m.col_entries_.resize(triples.size());
  std::vector<std::size_t> cursor(m.col_offsets_.begin(), m.col_offsets_.end() - 1);
  // Row-major traversal keeps each column's users ascending.
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t k = m.row_offsets_[u]; k < m.row_offsets_[u + 1]; ++k) {
      const auto& e = m.entries_[k];
      m.col_entries_[cursor[static_cast<std::size_t>(e.artist)]++] = {static_cast<UserIndex>(u),
                                                                      e.rating};
    }
  }
  return m;
}

void InteractionMatrix::CheckUser(UserIndex u) const {
  if (u < 0 || static_cast<std::size_t>(u) >= n_users())
    throw std::out_of_range("user index " + std::to_string(u) + " out of range");
}

void InteractionMatrix::CheckArtist(ArtistIndex a) const {
  if (a < 0 || static_cast<std::size_t>(a) >= n_artists())
    throw std::out_of_range("artist index " + std::to_string(a) + " out of range");
}

std::span<const RatingEntry> InteractionMatrix::Row(UserIndex u) const {
  CheckUser(u);
  const auto i = static_cast<std::size_t>(u);
  return {entries_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
}

std::span<const ColumnEntry> InteractionMatrix::Column(ArtistIndex a) const {
  CheckArtist(a);
  const auto i = static_cast<std::size_t>(a);
  return {col_entries_.data() + col_offsets_[i], col_offsets_[i + 1] - col_offsets_[i]};
}

std::optional<double> InteractionMatrix::Rating(UserIndex u, ArtistIndex a) const {
  CheckArtist(a);
  const auto row = Row(u);
  const auto it = std::lower_bound(row.begin(), row.end(), a,
                                   [](const RatingEntry& e, ArtistIndex x) { return e.artist < x; });
  if (it == row.end() || it->artist != a) return std::nullopt;
  return it->rating;
}

std::optional<UserIndex> InteractionMatrix::FindUser(std::string_view id) const {
  const auto it = std::lower_bound(user_ids_.begin(), user_ids_.end(), id);
  if (it == user_ids_.end() || *it != id) return std::nullopt;
  return static_cast<UserIndex>(it - user_ids_.begin());
}

std::optional<ArtistIndex> InteractionMatrix::FindArtist(std::string_view id) const {
  const auto it = std::lower_bound(artist_ids_.begin(), artist_ids_.end(), id);
  if (it == artist_ids_.end() || *it != id) return std::nullopt;
  return static_cast<ArtistIndex>(it - artist_ids_.begin());
}

std::vector<Triple> InteractionMatrix::Triples() const {
  std::vector<Triple> out;
  out.reserve(nnz());
  for (std::size_t u = 0; u < n_users(); ++u) {
    for (const auto& e : Row(static_cast<UserIndex>(u))) {
      out.push_back({static_cast<UserIndex>(u), e.artist, e.playcount});
    }
  }
  return out;
}

InteractionMatrix InteractionMatrix::WithoutEntries(
    const std::vector<std::vector<ArtistIndex>>& removed) const {
  std::vector<Triple> kept;
  kept.reserve(nnz());
  for (std::size_t u = 0; u < n_users(); ++u) {
    std::vector<ArtistIndex> drop;
    if (u < removed.size()) {
      drop = removed[u];
      std::sort(drop.begin(), drop.end());
    }
    for (const auto& e : Row(static_cast<UserIndex>(u))) {
      if (!std::binary_search(drop.begin(), drop.end(), e.artist)) {
        kept.push_back({static_cast<UserIndex>(u), e.artist, e.playcount});
      }
    }
  }
  return FromTriples(user_ids_, artist_ids_, std::move(kept));
}

BinaryView InteractionMatrix::Binarize() const { return BinaryView(*this); }

PopularityIndex BuildPopularity(const InteractionMatrix& matrix, double head_fraction) {
  PopularityIndex pop;
  const std::size_t na = matrix.n_artists();
  pop.total_plays.assign(na, 0);
  pop.listener_count.assign(na, 0);
  for (std::size_t u = 0; u < matrix.n_users(); ++u) {
    for (const auto& e : matrix.Row(static_cast<UserIndex>(u))) {
      pop.total_plays[static_cast<std::size_t>(e.artist)] += e.playcount;
      ++pop.listener_count[static_cast<std::size_t>(e.artist)];
    }
  }
  std::vector<std::size_t> order(na);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Index order equals id order.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pop.total_plays[a] > pop.total_plays[b];
  });
  pop.top_head_size = static_cast<std::size_t>(std::ceil(head_fraction * static_cast<double>(na) - 1e-9));
  pop.top_head_size = std::min(pop.top_head_size, na);
  pop.top_head.assign(na, false);
  for (std::size_t k = 0; k < pop.top_head_size; ++k) pop.top_head[order[k]] = true;
  return pop;
}

namespace {

template <typename T>
void PutLe(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T GetLe(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw PipelineError("snapshot", "truncated matrix snapshot");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

void PutString(std::ostream& out, const std::string& s) {
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string GetString(std::istream& in) {
  const auto n = GetLe<std::uint32_t>(in);
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw PipelineError("snapshot", "truncated id table");
  return s;
}

constexpr char kMagic[4] = {'F', 'R', 'I', 'M'};

}  // namespace

void WriteSnapshot(std::ostream& out, const InteractionMatrix& matrix) {
  out.write(kMagic, 4);
  PutLe<std::uint32_t>(out, 1);
  PutLe<std::uint64_t>(out, matrix.n_users());
  PutLe<std::uint64_t>(out, matrix.n_artists());
  PutLe<std::uint64_t>(out, matrix.nnz());
  for (const auto& t : matrix.Triples()) {
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(t.user));
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(t.artist));
    PutLe<std::uint64_t>(out, static_cast<std::uint64_t>(t.playcount));
  }
  for (const auto& id : matrix.user_ids()) PutString(out, id);
  for (const auto& id : matrix.artist_ids()) PutString(out, id);
}

InteractionMatrix ReadSnapshot(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw PipelineError("snapshot", "not a matrix snapshot");
  }
  if (GetLe<std::uint32_t>(in) != 1) throw PipelineError("snapshot", "unsupported version");
  const auto nu = GetLe<std::uint64_t>(in);
  const auto na = GetLe<std::uint64_t>(in);
  const auto nnz = GetLe<std::uint64_t>(in);
  std::vector<Triple> triples;
  triples.reserve(nnz);
  for (std::uint64_t k = 0; k < nnz; ++k) {
    Triple t;
    t.user = static_cast<UserIndex>(GetLe<std::uint32_t>(in));
    t.artist = static_cast<ArtistIndex>(GetLe<std::uint32_t>(in));
    t.playcount = static_cast<std::int64_t>(GetLe<std::uint64_t>(in));
    triples.push_back(t);
  }
  std::vector<std::string> users(nu), artists(na);
  for (auto& id : users) id = GetString(in);
  for (auto& id : artists) id = GetString(in);
  return InteractionMatrix::FromTriples(std::move(users), std::move(artists), std::move(triples));
}

}  // namespace fairrec
