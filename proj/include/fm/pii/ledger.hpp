#pragma once

#include <string>
#include <vector>

#include "fm/error.hpp"
#include "fm/pii/classify.hpp"

namespace fm::pii {

class LedgerError : public Error {
 public:
  LedgerError(std::string code, const std::string& what)
      : Error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

inline constexpr std::string_view TRANSFER_FORBIDDEN = "TRANSFER_FORBIDDEN";

/// Who a piece of personal information is about, and who currently holds a
/// copy. Proprietorship is fixed at registration: it names the referents, and
/// a fact cannot change what it is about. Possession moves freely.
struct LedgerEntry {
  std::string piece_id;
  std::vector<std::string> proprietors;  // frozen
  std::vector<std::string> possessors;   // mutable, any sphere or person id

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

class ProprietorshipLedger {
 public:
  /// Registers a classified piece: proprietors = referents, possessors start
  /// as `holders`. Throws LedgerError on duplicate piece or NotPII record.
  void register_piece(const PIIRecord& record,
                      const std::vector<std::string>& holders);

  void add_possessor(const std::string& piece, const std::string& holder);
  void remove_possessor(const std::string& piece, const std::string& holder);

  /// Always throws TRANSFER_FORBIDDEN: proprietorship is not transferable.
  void add_proprietor(const std::string& piece, const std::string& person);
  /// Always throws TRANSFER_FORBIDDEN.
  void remove_proprietor(const std::string& piece, const std::string& person);

  const LedgerEntry* find(const std::string& piece) const;
  const std::vector<LedgerEntry>& entries() const { return entries_; }

  bool is_proprietor(const std::string& piece, const std::string& person) const;
  bool is_possessor(const std::string& piece, const std::string& holder) const;

  friend bool operator==(const ProprietorshipLedger&,
                         const ProprietorshipLedger&) = default;

 private:
  LedgerEntry& require(const std::string& piece);
  std::vector<LedgerEntry> entries_;
};

std::string ledger_to_json_text(const ProprietorshipLedger& ledger);
ProprietorshipLedger ledger_from_json_text(const std::string& text);

}  // namespace fm::pii
