#include "fm/pii/ledger.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace fm::pii {

namespace {
using ordered_json = nlohmann::ordered_json;
}

LedgerEntry& ProprietorshipLedger::require(const std::string& piece) {
  for (auto& e : entries_) {
    if (e.piece_id == piece) return e;
  }
  throw LedgerError("UNKNOWN_PIECE", "ledger: no piece '" + piece + "'");
}

void ProprietorshipLedger::register_piece(
    const PIIRecord& record, const std::vector<std::string>& holders) {
  if (record.cls == PiiClass::NotPII)
    throw LedgerError("NOT_PII", "ledger: '" + record.assertion_id +
                                     "' has no person referents");
  if (find(record.assertion_id) != nullptr)
    throw LedgerError("DUPLICATE_PIECE",
                      "ledger: piece '" + record.assertion_id +
                          "' is already registered");
  LedgerEntry entry;
  entry.piece_id = record.assertion_id;
  entry.proprietors = record.referents;
  for (const auto& h : holders) {
    if (std::find(entry.possessors.begin(), entry.possessors.end(), h) ==
        entry.possessors.end())
      entry.possessors.push_back(h);
  }
  entries_.push_back(std::move(entry));
}

void ProprietorshipLedger::add_possessor(const std::string& piece,
                                         const std::string& holder) {
  LedgerEntry& e = require(piece);
  if (std::find(e.possessors.begin(), e.possessors.end(), holder) ==
      e.possessors.end())
    e.possessors.push_back(holder);
}

void ProprietorshipLedger::remove_possessor(const std::string& piece,
                                            const std::string& holder) {
  LedgerEntry& e = require(piece);
  e.possessors.erase(
      std::remove(e.possessors.begin(), e.possessors.end(), holder),
      e.possessors.end());
}

void ProprietorshipLedger::add_proprietor(const std::string& piece,
                                          const std::string& person) {
  (void)person;
  require(piece);
  throw LedgerError(std::string(TRANSFER_FORBIDDEN),
                    "ledger: proprietorship of '" + piece +
                        "' is fixed by what the information is about");
}

void ProprietorshipLedger::remove_proprietor(const std::string& piece,
                                             const std::string& person) {
  (void)person;
  require(piece);
  throw LedgerError(std::string(TRANSFER_FORBIDDEN),
                    "ledger: proprietorship of '" + piece +
                        "' is fixed by what the information is about");
}

const LedgerEntry* ProprietorshipLedger::find(const std::string& piece) const {
  for (const auto& e : entries_) {
    if (e.piece_id == piece) return &e;
  }
  return nullptr;
}

bool ProprietorshipLedger::is_proprietor(const std::string& piece,
                                         const std::string& person) const {
  const LedgerEntry* e = find(piece);
  if (e == nullptr) return false;
  return std::find(e->proprietors.begin(), e->proprietors.end(), person) !=
         e->proprietors.end();
}

bool ProprietorshipLedger::is_possessor(const std::string& piece,
                                        const std::string& holder) const {
  const LedgerEntry* e = find(piece);
  if (e == nullptr) return false;
  return std::find(e->possessors.begin(), e->possessors.end(), holder) !=
         e->possessors.end();
}

std::string ledger_to_json_text(const ProprietorshipLedger& ledger) {
  ordered_json j = ordered_json::array();
  for (const auto& e : ledger.entries()) {
    ordered_json ej;
    ej["piece"] = e.piece_id;
    ej["proprietors"] = e.proprietors;
    ej["possessors"] = e.possessors;
    j.push_back(std::move(ej));
  }
  return j.dump(2) + "\n";
}

ProprietorshipLedger ledger_from_json_text(const std::string& text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw Error("ledger: not a JSON array");
  ProprietorshipLedger ledger;
  for (const auto& ej : j) {
    PIIRecord record;
    try {
      record.assertion_id = ej.at("piece").get<std::string>();
      record.referents = ej.at("proprietors").get<std::vector<std::string>>();
      record.arity = static_cast<int>(record.referents.size());
      record.cls = record.arity == 0   ? PiiClass::NotPII
                   : record.arity == 1 ? PiiClass::Atomic
                                       : PiiClass::Compound;
      ledger.register_piece(record,
                            ej.at("possessors").get<std::vector<std::string>>());
    } catch (const ordered_json::exception& ex) {
      throw Error(std::string("ledger: ") + ex.what());
    }
  }
  return ledger;
}

}  // namespace fm::pii
