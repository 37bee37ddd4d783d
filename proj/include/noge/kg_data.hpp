#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace noge {

struct RawTriple {
  std::string head, relation, tail;
  bool operator==(const RawTriple&) const = default;
};

// Bijections token <-> index, built from the training split in
// first-appearance order. Entity node v of entity e is e itself; relation r
// occupies node entity_count() + r in the unified node space.
struct Vocabulary {
  std::vector<std::string> entity_tokens;
  std::vector<std::string> relation_tokens;
  std::unordered_map<std::string, int32_t> entity_ids;
  std::unordered_map<std::string, int32_t> relation_ids;

  int32_t entity_count() const { return static_cast<int32_t>(entity_tokens.size()); }
  int32_t relation_count() const { return static_cast<int32_t>(relation_tokens.size()); }
  int32_t node_count() const { return entity_count() + relation_count(); }
};

struct Triple {
  int32_t h = 0, r = 0, t = 0;
  bool operator==(const Triple&) const = default;
};

// Integer-encoded splits. When inverse_augmented, every original triple
// (h,r,t) is immediately followed by (t, r + R0, h) where R0 is the original
// relation count, so relations [R0, 2*R0) are the inverses.
struct Dataset {
  Vocabulary vocab;
  bool inverse_augmented = false;
  std::vector<Triple> train, valid, test;

  int32_t entity_count() const { return vocab.entity_count(); }
  int32_t num_relations() const {
    return inverse_augmented ? 2 * vocab.relation_count() : vocab.relation_count();
  }
  int32_t node_count() const { return entity_count() + num_relations(); }

  // The file-order triples of a split, dropping augmentation inverses.
  std::vector<Triple> original_triples(const std::vector<Triple>& split) const;

  // Token for a (possibly inverse) relation index.
  std::string relation_token(int32_t r) const;
};

// Split selector bitmask.
enum SplitMask : uint32_t {
  kTrainSplit = 1u,
  kValidSplit = 2u,
  kTestSplit = 4u,
  kAllSplits = 7u,
};

// (h,r) -> known tails and (t,r) -> known heads over the selected splits.
// Vectors are sorted and duplicate-free.
struct TruthIndex {
  std::unordered_map<uint64_t, std::vector<int32_t>> tails_of;
  std::unordered_map<uint64_t, std::vector<int32_t>> heads_of;

  static uint64_t key(int32_t a, int32_t r) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) |
           static_cast<uint32_t>(r);
  }
  std::span<const int32_t> tails(int32_t h, int32_t r) const;
  std::span<const int32_t> heads(int32_t t, int32_t r) const;
};

// Parses line-oriented tab-separated triples. Blank lines are skipped;
// malformed lines raise DataError naming the 1-based line number.
std::vector<RawTriple> parse_triples(std::string_view text);

std::vector<RawTriple> load_triples_file(const std::filesystem::path& path);

// Entities/relations indexed by first appearance over the training split.
Vocabulary build_vocabulary(std::span<const RawTriple> train);

// Encodes all splits against the vocabulary. Valid/test tokens missing from
// the vocabulary raise DataError listing every offending token.
Dataset encode_dataset(std::span<const RawTriple> train,
                       std::span<const RawTriple> valid,
                       std::span<const RawTriple> test, Vocabulary vocab,
                       bool add_inverses);

TruthIndex build_truth_index(const Dataset& dataset, uint32_t splits);

}  // namespace noge
