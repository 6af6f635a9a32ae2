#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace stratus {

using KvValue = nlohmann::json;

/// Versioned key-value state with optimistic concurrency control. Reads
/// record the version seen; commit validates every read against the current
/// version and applies buffered writes atomically. Commits are ordered by a
/// single writer, so the committed history is serially equivalent: a
/// conflicting transaction aborts instead of losing an update or observing
/// an inconsistent pair of reads.
class TxnEngine {
 public:
  struct Txn {
    std::string id;
    std::map<std::string, std::uint64_t> reads;            // key -> version at first read
    std::map<std::string, std::optional<KvValue>> writes;  // nullopt = erase
    bool active = true;
  };

  Txn begin(std::string id = {});
  /// Own writes are visible; otherwise the committed value (null if absent).
  KvValue read(Txn& txn, const std::string& key) const;
  bool exists(Txn& txn, const std::string& key) const;
  void write(Txn& txn, const std::string& key, KvValue value);
  void erase(Txn& txn, const std::string& key);
  /// True on commit; false is a conflict abort (retryable).
  bool commit(Txn& txn);

  KvValue get(const std::string& key) const;  // committed read outside a txn
  std::uint64_t version(const std::string& key) const;
  std::uint64_t commit_seq() const { return commit_seq_; }
  std::map<std::string, KvValue> snapshot() const;
  std::vector<std::string> keys(const std::string& prefix = {}) const;

  nlohmann::json serialize() const;
  void restore(const nlohmann::json& state);

 private:
  struct Cell {
    KvValue value;
    std::uint64_t version = 0;
  };
  std::map<std::string, Cell> cells_;
  std::uint64_t commit_seq_ = 0;
  std::uint64_t next_txn_ = 0;
};

/// One typed mutation inside a controller transaction.
struct TxOp {
  enum class Kind { put, add, erase, check };
  Kind kind = Kind::put;
  std::string key;
  KvValue value;      // put: stored value; check: expected value
  double delta = 0;   // add
};

struct Transaction {
  enum class Status { pending, committed, aborted };
  std::string id;
  std::vector<TxOp> ops;
  Status status = Status::pending;
};

TxOp op_put(std::string key, KvValue value);
TxOp op_add(std::string key, double delta);
TxOp op_erase(std::string key);
TxOp op_check(std::string key, KvValue expected);

/// Executes the transaction with retry on conflict abort. A failed check or
/// an add on a non-numeric value aborts without retry. Returns the final
/// status, recorded on the transaction.
Transaction::Status run_transaction(TxnEngine& engine, Transaction& tx, int max_retries = 16);

}  // namespace stratus
