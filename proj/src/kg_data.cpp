#include "noge/kg_data.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "noge/errors.hpp"

namespace noge {

namespace {

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' ||
                   s[e - 1] == '\n'))
    --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<RawTriple> parse_triples(std::string_view text) {
  std::vector<RawTriple> out;
  size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    if (pos == text.size()) break;
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (trim(line).empty()) continue;

    std::vector<std::string_view> fields;
    size_t f = 0;
    while (true) {
      size_t tab = line.find('\t', f);
      if (tab == std::string_view::npos) {
        fields.push_back(line.substr(f));
        break;
      }
      fields.push_back(line.substr(f, tab - f));
      f = tab + 1;
    }
    if (fields.size() != 3) {
      throw DataError("parse error at line " + std::to_string(line_no) +
                      ": expected 3 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    RawTriple t;
    t.head = std::string(trim(fields[0]));
    t.relation = std::string(trim(fields[1]));
    t.tail = std::string(trim(fields[2]));
    if (t.head.empty() || t.relation.empty() || t.tail.empty()) {
      throw DataError("parse error at line " + std::to_string(line_no) +
                      ": empty field after trimming");
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<RawTriple> load_triples_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_triples(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Vocabulary build_vocabulary(std::span<const RawTriple> train) {
  if (train.empty()) throw DataError("build_vocabulary: empty training split");
  Vocabulary v;
  auto add_entity = [&](const std::string& tok) {
    if (v.entity_ids.emplace(tok, v.entity_count()).second)
      v.entity_tokens.push_back(tok);
  };
  for (const RawTriple& t : train) {
    add_entity(t.head);
    if (v.relation_ids.emplace(t.relation, v.relation_count()).second)
      v.relation_tokens.push_back(t.relation);
    add_entity(t.tail);
  }
  return v;
}

namespace {

std::vector<Triple> encode_split(std::span<const RawTriple> raw,
                                 const Vocabulary& vocab, bool add_inverses,
                                 std::set<std::string>* missing_entities,
                                 std::set<std::string>* missing_relations) {
  const int32_t r0 = vocab.relation_count();
  std::vector<Triple> out;
  out.reserve(raw.size() * (add_inverses ? 2 : 1));
  for (const RawTriple& t : raw) {
    auto hi = vocab.entity_ids.find(t.head);
    auto ri = vocab.relation_ids.find(t.relation);
    auto ti = vocab.entity_ids.find(t.tail);
    bool ok = true;
    if (hi == vocab.entity_ids.end()) { missing_entities->insert(t.head); ok = false; }
    if (ri == vocab.relation_ids.end()) { missing_relations->insert(t.relation); ok = false; }
    if (ti == vocab.entity_ids.end()) { missing_entities->insert(t.tail); ok = false; }
    if (!ok) continue;
    out.push_back({hi->second, ri->second, ti->second});
    if (add_inverses)
      out.push_back({ti->second, static_cast<int32_t>(ri->second + r0), hi->second});
  }
  return out;
}

}  // namespace

Dataset encode_dataset(std::span<const RawTriple> train,
                       std::span<const RawTriple> valid,
                       std::span<const RawTriple> test, Vocabulary vocab,
                       bool add_inverses) {
  Dataset d;
  d.vocab = std::move(vocab);
  d.inverse_augmented = add_inverses;
  std::set<std::string> missing_e, missing_r;
  d.train = encode_split(train, d.vocab, add_inverses, &missing_e, &missing_r);
  d.valid = encode_split(valid, d.vocab, add_inverses, &missing_e, &missing_r);
  d.test = encode_split(test, d.vocab, add_inverses, &missing_e, &missing_r);
  if (!missing_e.empty() || !missing_r.empty()) {
    std::string msg;
    for (const auto& e : missing_e) {
      msg += msg.empty() ? "" : "; ";
      msg += "unknown entity: " + e;
    }
    for (const auto& r : missing_r) {
      msg += msg.empty() ? "" : "; ";
      msg += "unknown relation: " + r;
    }
    throw DataError(msg);
  }
  return d;
}

std::vector<Triple> Dataset::original_triples(const std::vector<Triple>& split) const {
  if (!inverse_augmented) return split;
  const int32_t r0 = vocab.relation_count();
  std::vector<Triple> out;
  out.reserve(split.size() / 2);
  for (const Triple& t : split)
    if (t.r < r0) out.push_back(t);
  return out;
}

std::string Dataset::relation_token(int32_t r) const {
  const int32_t r0 = vocab.relation_count();
  if (r < r0) return vocab.relation_tokens[static_cast<size_t>(r)];
  return vocab.relation_tokens[static_cast<size_t>(r - r0)] + "_reverse";
}

std::span<const int32_t> TruthIndex::tails(int32_t h, int32_t r) const {
  auto it = tails_of.find(key(h, r));
  if (it == tails_of.end()) return {};
  return it->second;
}

std::span<const int32_t> TruthIndex::heads(int32_t t, int32_t r) const {
  auto it = heads_of.find(key(t, r));
  if (it == heads_of.end()) return {};
  return it->second;
}

TruthIndex build_truth_index(const Dataset& dataset, uint32_t splits) {
  TruthIndex idx;
  auto add = [&](const std::vector<Triple>& split) {
    for (const Triple& t : split) {
      idx.tails_of[TruthIndex::key(t.h, t.r)].push_back(t.t);
      idx.heads_of[TruthIndex::key(t.t, t.r)].push_back(t.h);
    }
  };
  if (splits & kTrainSplit) add(dataset.train);
  if (splits & kValidSplit) add(dataset.valid);
  if (splits & kTestSplit) add(dataset.test);
  auto dedupe = [](std::unordered_map<uint64_t, std::vector<int32_t>>& m) {
    for (auto& [k, v] : m) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  };
  dedupe(idx.tails_of);
  dedupe(idx.heads_of);
  return idx;
}

}  // namespace noge
