#include "refcast/panel.hpp"

#include "refcast/common.hpp"
#include "refcast/csv.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace refcast {

namespace {

constexpr char kCacheMagic[8] = {'R', 'F', 'C', 'A', 'S', 'T', '0', '\n'};
constexpr std::uint32_t kCacheVersion = 1;

const std::vector<std::string> kPanelHeader = {
    "firm_id", "fiscal_year", "fye_month", "sales", "ebit", "total_assets",
    "shareholder_equity", "sic", "beta", "pe_ratio", "pb_ratio"};

}  // namespace

void CpiSeries::set(int year, int month, double value) {
    if (value <= 0.0) throw DataError("CPI must be positive");
    values_[{year, month}] = value;
}

bool CpiSeries::has(int year, int month) const {
    return values_.count({year, month}) > 0;
}

double CpiSeries::at(int year, int month) const {
    auto it = values_.find({year, month});
    if (it == values_.end()) {
        std::ostringstream os;
        os << "CPI gap: no value for " << year << "-" << month;
        throw DataError(os.str());
    }
    return it->second;
}

CpiSeries CpiSeries::from_csv(const std::string& path) {
    auto table = csv::read_file(path);
    int c_year = table.column("year");
    int c_month = table.column("month");
    int c_cpi = table.column("cpi");
    if (c_year < 0 || c_month < 0 || c_cpi < 0)
        throw DataError(path + ": expected header year,month,cpi");
    CpiSeries cpi;
    std::size_t row_no = 1;
    for (const auto& row : table.rows) {
        ++row_no;
        std::string ctx = path + " row " + std::to_string(row_no);
        auto year = csv::parse_int(row.at(c_year), ctx);
        auto month = csv::parse_int(row.at(c_month), ctx);
        auto value = csv::parse_double(row.at(c_cpi), ctx);
        if (!year || !month || !value) throw DataError(ctx + ": year, month and cpi are required");
        if (*month < 1 || *month > 12) throw DataError(ctx + ": month out of range");
        if (*value <= 0.0) throw DataError(ctx + ": CPI must be positive");
        cpi.set(static_cast<int>(*year), static_cast<int>(*month), *value);
    }
    return cpi;
}

Panel Panel::from_records(std::vector<FirmYearRecord> records, const LoadOptions& options,
                          LoadStats* stats) {
    LoadStats local;
    LoadStats& st = stats ? *stats : local;
    st.rows_read = records.size();

    if (options.exclude_financial_sic) {
        auto pred = [](const FirmYearRecord& r) {
            return r.sic && *r.sic >= 6000 && *r.sic <= 6799;
        };
        st.rows_excluded_sic =
            static_cast<std::size_t>(std::count_if(records.begin(), records.end(), pred));
        std::erase_if(records, pred);
    }

    for (const auto& r : records) {
        if (r.sales && *r.sales < 0.0)
            throw DataError("negative sales for firm " + r.firm_id + " year " +
                            std::to_string(r.fiscal_year));
        if (r.fye_month < 1 || r.fye_month > 12)
            throw DataError("fye_month out of range for firm " + r.firm_id + " year " +
                            std::to_string(r.fiscal_year));
    }

    std::sort(records.begin(), records.end(), [](const FirmYearRecord& a, const FirmYearRecord& b) {
        if (a.firm_id != b.firm_id) return a.firm_id < b.firm_id;
        return a.fiscal_year < b.fiscal_year;
    });
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].firm_id == records[i - 1].firm_id &&
            records[i].fiscal_year == records[i - 1].fiscal_year)
            throw DataError("duplicate observation: firm " + records[i].firm_id + " year " +
                            std::to_string(records[i].fiscal_year));
    }

    // Firm-level filters: no sales information anywhere, then single records.
    {
        std::vector<FirmYearRecord> kept;
        kept.reserve(records.size());
        std::size_t i = 0;
        while (i < records.size()) {
            std::size_t j = i;
            bool any_sales = false;
            while (j < records.size() && records[j].firm_id == records[i].firm_id) {
                any_sales = any_sales || records[j].sales.has_value();
                ++j;
            }
            std::size_t count = j - i;
            if (!any_sales) {
                st.firms_dropped_no_sales += 1;
                st.rows_dropped_no_sales += count;
            } else if (count < 2) {
                st.firms_dropped_single += 1;
                st.rows_dropped_single += count;
            } else {
                for (std::size_t k = i; k < j; ++k) kept.push_back(std::move(records[k]));
            }
            i = j;
        }
        records = std::move(kept);
    }
    st.rows_kept = records.size();

    Panel p;
    p.records_ = std::move(records);
    if (p.records_.empty()) throw DataError("panel is empty after filtering");

    p.start_year_ = p.records_.front().fiscal_year;
    p.end_year_ = p.records_.front().fiscal_year;
    for (const auto& r : p.records_) {
        p.start_year_ = std::min(p.start_year_, r.fiscal_year);
        p.end_year_ = std::max(p.end_year_, r.fiscal_year);
    }

    p.firm_of_record_.resize(p.records_.size());
    for (std::size_t i = 0; i < p.records_.size(); ++i) {
        if (i == 0 || p.records_[i].firm_id != p.records_[i - 1].firm_id) {
            p.firm_span_begin_.push_back(i);
            p.firm_ids_.push_back(p.records_[i].firm_id);
        }
        p.firm_of_record_[i] = static_cast<int>(p.firm_ids_.size()) - 1;
    }
    p.firm_span_begin_.push_back(p.records_.size());

    p.by_year_.resize(static_cast<std::size_t>(p.end_year_ - p.start_year_) + 1);
    for (std::size_t i = 0; i < p.records_.size(); ++i)
        p.by_year_[static_cast<std::size_t>(p.records_[i].fiscal_year - p.start_year_)].push_back(i);
    // Records are firm-major, so each year bucket is already ascending by
    // firm index; sort anyway to keep the invariant independent of storage.
    for (auto& bucket : p.by_year_) std::sort(bucket.begin(), bucket.end());

    return p;
}

int Panel::firm_index(const std::string& firm_id) const {
    auto it = std::lower_bound(firm_ids_.begin(), firm_ids_.end(), firm_id);
    if (it == firm_ids_.end() || *it != firm_id) return -1;
    return static_cast<int>(it - firm_ids_.begin());
}

Panel::IndexRange Panel::records_of_firm(int firm_idx) const {
    return {firm_span_begin_[static_cast<std::size_t>(firm_idx)],
            firm_span_begin_[static_cast<std::size_t>(firm_idx) + 1]};
}

std::span<const std::size_t> Panel::records_in_year(int year) const {
    if (year < start_year_ || year > end_year_) return {};
    const auto& bucket = by_year_[static_cast<std::size_t>(year - start_year_)];
    return {bucket.data(), bucket.size()};
}

std::size_t Panel::find_record(int firm_idx, int year) const {
    std::size_t begin = firm_span_begin_[static_cast<std::size_t>(firm_idx)];
    std::size_t end = firm_span_begin_[static_cast<std::size_t>(firm_idx) + 1];
    // Years are sorted within a firm's span.
    std::size_t lo = begin, hi = end;
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (records_[mid].fiscal_year < year)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < end && records_[lo].fiscal_year == year) return lo;
    return npos;
}

std::optional<double> Panel::sales_at(int firm_idx, int year) const {
    std::size_t idx = find_record(firm_idx, year);
    if (idx == npos) return std::nullopt;
    return records_[idx].sales;
}

namespace {

std::optional<double> field_double(const std::vector<std::string>& row, int col,
                                   const std::string& ctx) {
    if (col < 0 || col >= static_cast<int>(row.size())) return std::nullopt;
    return csv::parse_double(row[static_cast<std::size_t>(col)], ctx);
}

std::optional<long long> field_int(const std::vector<std::string>& row, int col,
                                   const std::string& ctx) {
    if (col < 0 || col >= static_cast<int>(row.size())) return std::nullopt;
    return csv::parse_int(row[static_cast<std::size_t>(col)], ctx);
}

}  // namespace

Panel load_panel(const std::string& panel_csv, const std::optional<std::string>& cpi_csv,
                 const LoadOptions& options, LoadStats* stats) {
    auto table = csv::read_file(panel_csv);
    int c_firm = table.column("firm_id");
    int c_year = table.column("fiscal_year");
    if (c_firm < 0 || c_year < 0)
        throw DataError(panel_csv + ": header must contain firm_id and fiscal_year");
    int c_month = table.column("fye_month");
    int c_sales = table.column("sales");
    int c_ebit = table.column("ebit");
    int c_assets = table.column("total_assets");
    int c_equity = table.column("shareholder_equity");
    int c_sic = table.column("sic");
    int c_beta = table.column("beta");
    int c_pe = table.column("pe_ratio");
    int c_pb = table.column("pb_ratio");

    std::optional<CpiSeries> cpi;
    if (cpi_csv) cpi = CpiSeries::from_csv(*cpi_csv);

    std::vector<FirmYearRecord> records;
    records.reserve(table.rows.size());
    std::size_t row_no = 1;  // header was row 1
    for (const auto& row : table.rows) {
        ++row_no;
        std::string ctx = panel_csv + " row " + std::to_string(row_no);
        FirmYearRecord r;
        if (c_firm >= static_cast<int>(row.size()))
            throw DataError(ctx + ": too few fields");
        r.firm_id = row[static_cast<std::size_t>(c_firm)];
        if (r.firm_id.empty()) throw DataError(ctx + ": empty firm_id");
        auto year = field_int(row, c_year, ctx);
        if (!year) throw DataError(ctx + ": fiscal_year is required");
        r.fiscal_year = static_cast<int>(*year);
        auto month = field_int(row, c_month, ctx);
        r.fye_month = month ? static_cast<int>(*month) : 12;
        if (r.fye_month < 1 || r.fye_month > 12)
            throw DataError(ctx + ": fye_month out of range");
        r.sales = field_double(row, c_sales, ctx);
        if (r.sales && *r.sales < 0.0) throw DataError(ctx + ": negative sales");
        r.ebit = field_double(row, c_ebit, ctx);
        r.total_assets = field_double(row, c_assets, ctx);
        r.shareholder_equity = field_double(row, c_equity, ctx);
        auto sic = field_int(row, c_sic, ctx);
        if (sic) {
            if (*sic < 0 || *sic > 9999) throw DataError(ctx + ": SIC out of range");
            r.sic = static_cast<int>(*sic);
        }
        r.beta = field_double(row, c_beta, ctx);
        r.pe_ratio = field_double(row, c_pe, ctx);
        r.pb_ratio = field_double(row, c_pb, ctx);

        if (cpi) {
            double deflator = cpi->at(r.fiscal_year, r.fye_month) / 100.0;
            auto deflate = [&](std::optional<double>& v) {
                if (v) v = *v / deflator;
            };
            deflate(r.sales);
            deflate(r.ebit);
            deflate(r.total_assets);
            deflate(r.shareholder_equity);
        }
        records.push_back(std::move(r));
    }
    return Panel::from_records(std::move(records), options, stats);
}

double survivorship_rate(const Panel& panel, int h) {
    if (h < 1) throw DataError("survivorship horizon must be >= 1");
    std::size_t eligible = 0, survived = 0;
    for (std::size_t i = 0; i < panel.n_records(); ++i) {
        const auto& r = panel.record(i);
        if (r.fiscal_year + h > panel.end_year()) continue;
        ++eligible;
        if (panel.find_record(panel.firm_of_record(i), r.fiscal_year + h) != Panel::npos)
            ++survived;
    }
    if (eligible == 0)
        throw DataError("no observation has year + " + std::to_string(h) + " inside the panel");
    return static_cast<double>(survived) / static_cast<double>(eligible);
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v & 0xff),
                            static_cast<unsigned char>((v >> 8) & 0xff),
                            static_cast<unsigned char>((v >> 16) & 0xff),
                            static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char buf[4];
    is.read(reinterpret_cast<char*>(buf), 4);
    if (!is) throw DataError("panel cache truncated");
    return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

void put_double(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u32(os, static_cast<std::uint32_t>(bits & 0xffffffffu));
    put_u32(os, static_cast<std::uint32_t>(bits >> 32));
}

double get_double(std::istream& is) {
    std::uint64_t lo = get_u32(is);
    std::uint64_t hi = get_u32(is);
    std::uint64_t bits = lo | (hi << 32);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void put_opt(const std::optional<double>& v, unsigned& mask, unsigned bit,
             std::vector<double>& payload) {
    if (v) {
        mask |= bit;
        payload.push_back(*v);
    }
}

}  // namespace

void save_panel_cache(const Panel& panel, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write panel cache: " + path);
    os.write(kCacheMagic, sizeof(kCacheMagic));
    put_u32(os, kCacheVersion);
    put_u32(os, static_cast<std::uint32_t>(panel.n_records()));
    for (std::size_t i = 0; i < panel.n_records(); ++i) {
        const auto& r = panel.record(i);
        put_u32(os, static_cast<std::uint32_t>(r.firm_id.size()));
        os.write(r.firm_id.data(), static_cast<std::streamsize>(r.firm_id.size()));
        put_u32(os, static_cast<std::uint32_t>(r.fiscal_year));
        put_u32(os, static_cast<std::uint32_t>(r.fye_month));
        unsigned mask = 0;
        std::vector<double> payload;
        put_opt(r.sales, mask, 1u, payload);
        put_opt(r.ebit, mask, 2u, payload);
        put_opt(r.total_assets, mask, 4u, payload);
        put_opt(r.shareholder_equity, mask, 8u, payload);
        put_opt(r.beta, mask, 16u, payload);
        put_opt(r.pe_ratio, mask, 32u, payload);
        put_opt(r.pb_ratio, mask, 64u, payload);
        if (r.sic) mask |= 128u;
        put_u32(os, mask);
        for (double v : payload) put_double(os, v);
        if (r.sic) put_u32(os, static_cast<std::uint32_t>(*r.sic));
    }
    if (!os) throw DataError("write failed: " + path);
}

Panel load_panel_cache(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open panel cache: " + path);
    char magic[sizeof(kCacheMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0)
        throw DataError(path + " is not a refcast panel cache");
    std::uint32_t version = get_u32(is);
    if (version != kCacheVersion)
        throw DataError(path + ": unsupported cache version " + std::to_string(version));
    std::uint32_t count = get_u32(is);
    std::vector<FirmYearRecord> records;
    records.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        FirmYearRecord r;
        std::uint32_t len = get_u32(is);
        r.firm_id.resize(len);
        is.read(r.firm_id.data(), len);
        r.fiscal_year = static_cast<int>(get_u32(is));
        r.fye_month = static_cast<int>(get_u32(is));
        unsigned mask = get_u32(is);
        auto read_opt = [&](unsigned bit) -> std::optional<double> {
            if (mask & bit) return get_double(is);
            return std::nullopt;
        };
        r.sales = read_opt(1u);
        r.ebit = read_opt(2u);
        r.total_assets = read_opt(4u);
        r.shareholder_equity = read_opt(8u);
        r.beta = read_opt(16u);
        r.pe_ratio = read_opt(32u);
        r.pb_ratio = read_opt(64u);
        if (mask & 128u) r.sic = static_cast<int>(get_u32(is));
        if (!is) throw DataError("panel cache truncated");
        records.push_back(std::move(r));
    }
    // Cached records already passed filtering; rebuild indices only.
    return Panel::from_records(std::move(records));
}

bool is_panel_cache(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return false;
    char magic[sizeof(kCacheMagic)];
    is.read(magic, sizeof(magic));
    return is && std::memcmp(magic, kCacheMagic, sizeof(magic)) == 0;
}

Panel load_panel_any(const std::string& path) {
    if (is_panel_cache(path)) return load_panel_cache(path);
    return load_panel(path, std::nullopt);
}

void write_panel_csv(const Panel& panel, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write: " + path);
    csv::write_row(os, kPanelHeader);
    auto fmt = [](const std::optional<double>& v) {
        return v ? csv::format_double(*v) : std::string();
    };
    for (std::size_t i = 0; i < panel.n_records(); ++i) {
        const auto& r = panel.record(i);
        csv::write_row(os, {r.firm_id, std::to_string(r.fiscal_year), std::to_string(r.fye_month),
                            fmt(r.sales), fmt(r.ebit), fmt(r.total_assets),
                            fmt(r.shareholder_equity), r.sic ? std::to_string(*r.sic) : "",
                            fmt(r.beta), fmt(r.pe_ratio), fmt(r.pb_ratio)});
    }
    if (!os) throw DataError("write failed: " + path);
}

}  // namespace refcast
