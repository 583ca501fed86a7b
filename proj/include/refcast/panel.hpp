#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace refcast {

// One firm-year observation. Monetary fields are in million USD and, once a
// CPI series has been applied, deflated to the CPI base. Absent fields stay
// std::nullopt; they are never encoded as sentinel numbers.
struct FirmYearRecord {
    std::string firm_id;
    int fiscal_year = 0;
    int fye_month = 12;  // fiscal-year-end month, 1..12
    std::optional<double> sales;
    std::optional<double> ebit;
    std::optional<double> total_assets;
    std::optional<double> shareholder_equity;
    std::optional<int> sic;  // 4-digit industry code
    std::optional<double> beta;
    std::optional<double> pe_ratio;
    std::optional<double> pb_ratio;
};

// Monthly consumer-price index, base 1982-1984 = 100.
class CpiSeries {
public:
    void set(int year, int month, double value);
    bool has(int year, int month) const;
    // Throws DataError when the requested month is absent.
    double at(int year, int month) const;
    bool empty() const { return values_.empty(); }

    static CpiSeries from_csv(const std::string& path);

private:
    std::map<std::pair<int, int>, double> values_;
};

struct LoadOptions {
    bool exclude_financial_sic = false;  // drop SIC 6000-6799 rows
};

struct LoadStats {
    std::size_t rows_read = 0;
    std::size_t rows_kept = 0;
    std::size_t rows_excluded_sic = 0;
    std::size_t firms_dropped_no_sales = 0;
    std::size_t rows_dropped_no_sales = 0;
    std::size_t firms_dropped_single = 0;
    std::size_t rows_dropped_single = 0;
};

// Immutable firm-year panel. Records are stored sorted by (firm_id,
// fiscal_year); firms are indexed by their position in the sorted unique
// id list, so indices are stable for identical inputs. Safe for concurrent
// reads once constructed.
class Panel {
public:
    // Validates, filters (no-sales firms, single-observation firms) and
    // indexes a record set. Duplicate (firm, year) is a hard error.
    static Panel from_records(std::vector<FirmYearRecord> records, const LoadOptions& options = {},
                              LoadStats* stats = nullptr);

    std::size_t n_records() const { return records_.size(); }
    const FirmYearRecord& record(std::size_t idx) const { return records_[idx]; }

    int start_year() const { return start_year_; }
    int end_year() const { return end_year_; }

    std::size_t n_firms() const { return firm_ids_.size(); }
    const std::string& firm_id(int firm_idx) const { return firm_ids_[firm_idx]; }
    int firm_index(const std::string& firm_id) const;  // -1 if unknown
    int firm_of_record(std::size_t idx) const { return firm_of_record_[idx]; }

    // Record indices of one firm, ascending by year. Storage is firm-major,
    // so these are a contiguous index range [begin, end).
    struct IndexRange {
        std::size_t begin = 0;
        std::size_t end = 0;
        std::size_t size() const { return end - begin; }
    };
    IndexRange records_of_firm(int firm_idx) const;
    // Record indices observed in one year, ascending by firm index.
    std::span<const std::size_t> records_in_year(int year) const;
    // Index of the (firm, year) record, or npos when absent.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t find_record(int firm_idx, int year) const;

    // Sales of (firm, year); missing when the record or its sales is absent.
    std::optional<double> sales_at(int firm_idx, int year) const;

private:
    std::vector<FirmYearRecord> records_;
    std::vector<std::string> firm_ids_;
    std::vector<int> firm_of_record_;
    std::vector<std::size_t> firm_span_begin_;  // per firm, into record indices
    std::vector<std::vector<std::size_t>> by_year_;
    int start_year_ = 0;
    int end_year_ = 0;
};

// Loads the panel CSV (header: firm_id,fiscal_year,fye_month,sales,ebit,
// total_assets,shareholder_equity,sic,beta,pe_ratio,pb_ratio). When a CPI
// CSV (year,month,cpi) is given, all USD fields are divided by
// CPI(fiscal-year-end month)/100; a CPI gap for a needed month is a hard
// error. Malformed rows and duplicate (firm, year) pairs are hard errors
// naming the row.
Panel load_panel(const std::string& panel_csv, const std::optional<std::string>& cpi_csv,
                 const LoadOptions& options = {}, LoadStats* stats = nullptr);

// Share of observations (i,t) with t+h <= end_year whose firm is still
// observed at t+h. Throws DataError when no observation has t+h in range.
double survivorship_rate(const Panel& panel, int h);

// Versioned binary cache. Byte-identical for identical inputs.
void save_panel_cache(const Panel& panel, const std::string& path);
Panel load_panel_cache(const std::string& path);
bool is_panel_cache(const std::string& path);
// Dispatches on the file's magic bytes: cache or CSV (CSV without CPI).
Panel load_panel_any(const std::string& path);

// Writes records back to the standard panel CSV schema.
void write_panel_csv(const Panel& panel, const std::string& path);

}  // namespace refcast
