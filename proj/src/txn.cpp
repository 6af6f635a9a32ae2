#include "stratus/txn.hpp"

namespace stratus {

TxnEngine::Txn TxnEngine::begin(std::string id) {
  Txn t;
  t.id = id.empty() ? "t-" + std::to_string(++next_txn_) : std::move(id);
  return t;
}

KvValue TxnEngine::read(Txn& txn, const std::string& key) const {
  auto w = txn.writes.find(key);
  if (w != txn.writes.end()) return w->second ? *w->second : KvValue();
  auto it = cells_.find(key);
  std::uint64_t version = it == cells_.end() ? 0 : it->second.version;
  txn.reads.emplace(key, version);  // first read wins
  return it == cells_.end() ? KvValue() : it->second.value;
}

bool TxnEngine::exists(Txn& txn, const std::string& key) const {
  return !read(txn, key).is_null();
}

void TxnEngine::write(Txn& txn, const std::string& key, KvValue value) {
  txn.writes[key] = std::move(value);
}

void TxnEngine::erase(Txn& txn, const std::string& key) { txn.writes[key] = std::nullopt; }

bool TxnEngine::commit(Txn& txn) {
  if (!txn.active) return false;
  for (const auto& [key, seen] : txn.reads) {
    auto it = cells_.find(key);
    std::uint64_t current = it == cells_.end() ? 0 : it->second.version;
    if (current != seen) {
      txn.active = false;
      return false;  // conflict abort
    }
  }
  for (auto& [key, value] : txn.writes) {
    ++commit_seq_;
    if (value) {
      cells_[key] = Cell{std::move(*value), commit_seq_};
    } else {
      cells_.erase(key);
    }
  }
  txn.active = false;
  return true;
}

KvValue TxnEngine::get(const std::string& key) const {
  auto it = cells_.find(key);
  return it == cells_.end() ? KvValue() : it->second.value;
}

std::uint64_t TxnEngine::version(const std::string& key) const {
  auto it = cells_.find(key);
  return it == cells_.end() ? 0 : it->second.version;
}

std::map<std::string, KvValue> TxnEngine::snapshot() const {
  std::map<std::string, KvValue> out;
  for (const auto& [k, cell] : cells_) out[k] = cell.value;
  return out;
}

std::vector<std::string> TxnEngine::keys(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, cell] : cells_) {
    (void)cell;
    if (k.compare(0, prefix.size(), prefix) == 0) out.push_back(k);
  }
  return out;
}

nlohmann::json TxnEngine::serialize() const {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [k, cell] : cells_)
    entries[k] = {{"value", cell.value}, {"version", cell.version}};
  return {{"commit_seq", commit_seq_}, {"entries", entries}};
}

void TxnEngine::restore(const nlohmann::json& state) {
  cells_.clear();
  commit_seq_ = state.at("commit_seq").get<std::uint64_t>();
  for (const auto& [k, cell] : state.at("entries").items()) {
    cells_[k] = Cell{cell.at("value"), cell.at("version").get<std::uint64_t>()};
  }
}

TxOp op_put(std::string key, KvValue value) {
  return TxOp{TxOp::Kind::put, std::move(key), std::move(value), 0};
}

TxOp op_add(std::string key, double delta) {
  return TxOp{TxOp::Kind::add, std::move(key), KvValue(), delta};
}

TxOp op_erase(std::string key) { return TxOp{TxOp::Kind::erase, std::move(key), KvValue(), 0}; }

TxOp op_check(std::string key, KvValue expected) {
  return TxOp{TxOp::Kind::check, std::move(key), std::move(expected), 0};
}

Transaction::Status run_transaction(TxnEngine& engine, Transaction& tx, int max_retries) {
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    TxnEngine::Txn t = engine.begin(tx.id);
    bool invalid = false;
    for (const auto& op : tx.ops) {
      switch (op.kind) {
        case TxOp::Kind::put:
          engine.write(t, op.key, op.value);
          break;
        case TxOp::Kind::add: {
          KvValue current = engine.read(t, op.key);
          double base = 0;
          if (current.is_number())
            base = current.get<double>();
          else if (!current.is_null())
            invalid = true;
          engine.write(t, op.key, base + op.delta);
          break;
        }
        case TxOp::Kind::erase:
          engine.erase(t, op.key);
          break;
        case TxOp::Kind::check: {
          KvValue current = engine.read(t, op.key);
          if (current != op.value) invalid = true;
          break;
        }
      }
      if (invalid) break;
    }
    if (invalid) {
      tx.status = Transaction::Status::aborted;
      return tx.status;
    }
    if (engine.commit(t)) {
      tx.status = Transaction::Status::committed;
      return tx.status;
    }
    // conflict abort: retry against fresh state
  }
  tx.status = Transaction::Status::aborted;
  return tx.status;
}

}  // namespace stratus
