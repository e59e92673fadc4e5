#pragma once

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "storyweave/extract.hpp"
#include "storyweave/http.hpp"
#include "storyweave/markup.hpp"

namespace storyweave {

struct DecodedImage {
    int width = 0;
    int height = 0;
    std::vector<unsigned char> rgb; // packed RGB8, row-major
};

inline std::optional<DecodedImage> decode_png(const std::string& bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        png_image_free(&image);
        return std::nullopt;
    }
    image.format = PNG_FORMAT_RGB;
    DecodedImage out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.rgb.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.rgb.data(), 0, nullptr)) {
        png_image_free(&image);
        return std::nullopt;
    }
    return out;
}

namespace detail_images {

struct JpegErr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

inline void jpeg_error_trampoline(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErr*>(cinfo->err);
    std::longjmp(err->jump, 1);
}

} // namespace detail_images

inline std::optional<DecodedImage> decode_jpeg(const std::string& bytes) {
    jpeg_decompress_struct cinfo;
    detail_images::JpegErr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = detail_images::jpeg_error_trampoline;

    DecodedImage out;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        return std::nullopt;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, reinterpret_cast<const unsigned char*>(bytes.data()),
                 static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    out.width = static_cast<int>(cinfo.output_width);
    out.height = static_cast<int>(cinfo.output_height);
    out.rgb.resize(size_t(out.width) * size_t(out.height) * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        unsigned char* row = out.rgb.data() + size_t(cinfo.output_scanline) * out.width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

inline std::optional<DecodedImage> decode_image(const std::string& bytes) {
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) == 0)
        return decode_png(bytes);
    if (bytes.size() >= 3 && std::memcmp(bytes.data(), "\xFF\xD8\xFF", 3) == 0)
        return decode_jpeg(bytes);
    return std::nullopt;
}

inline DecodedImage downscale_nn(const DecodedImage& img, int max_side) {
    if (img.width <= max_side && img.height <= max_side) return img;
    double scale = double(max_side) / double(std::max(img.width, img.height));
    DecodedImage out;
    out.width = std::max(1, int(img.width * scale));
    out.height = std::max(1, int(img.height * scale));
    out.rgb.resize(size_t(out.width) * size_t(out.height) * 3);
    for (int y = 0; y < out.height; ++y) {
        int sy = std::min(img.height - 1, int(double(y) * img.height / out.height));
        for (int x = 0; x < out.width; ++x) {
            int sx = std::min(img.width - 1, int(double(x) * img.width / out.width));
            const unsigned char* s = img.rgb.data() + (size_t(sy) * img.width + sx) * 3;
            unsigned char* d = out.rgb.data() + (size_t(y) * out.width + x) * 3;
            d[0] = s[0];
            d[1] = s[1];
            d[2] = s[2];
        }
    }
    return out;
}

// Distinct RGB triples, counted on a bounded downscale so cost stays flat.
inline int count_colors(const DecodedImage& img, int max_side = 256) {
    const DecodedImage& small = (img.width > max_side || img.height > max_side)
                                    ? downscale_nn(img, max_side)
                                    : img;
    std::unordered_set<unsigned> colors;
    const size_t pixels = size_t(small.width) * size_t(small.height);
    for (size_t i = 0; i < pixels; ++i) {
        const unsigned char* p = small.rgb.data() + i * 3;
        colors.insert((unsigned(p[0]) << 16) | (unsigned(p[1]) << 8) | unsigned(p[2]));
    }
    return static_cast<int>(colors.size());
}

struct ImageScoreParams {
    double meta_bonus = 2.0;
    double pixel_norm = 307200; // ~640x480
    double color_norm = 4096;
    long min_pixel_count = 5000;
    double max_aspect = 5.0;
    size_t max_bytes = 10 * 1024 * 1024;
};

struct ScoredImage {
    std::string src;
    bool is_meta = false;
    int position = 0; // 1-based over the pre-filter candidate list
    int width = 0;
    int height = 0;
    long pixel_count = 0;
    int color_count = 0;
    double score = 0;

    friend bool operator==(const ScoredImage&, const ScoredImage&) = default;
};

// Meta flag dominates; then pixel mass, palette, squareness, page position.
inline double image_score(bool is_meta, long pixel_count, int color_count, int width, int height,
                          int position, size_t candidate_count,
                          const ImageScoreParams& params = {}) {
    double s = 0;
    if (is_meta) s += params.meta_bonus;
    s += 0.40 * std::min(1.0, double(pixel_count) / params.pixel_norm);
    s += 0.25 * std::min(1.0, double(color_count) / params.color_norm);
    s += 0.20 * std::exp(-std::fabs(std::log(double(width) / double(height))));
    double denom = std::max<double>(1.0, double(candidate_count) - 1.0);
    s += 0.15 * (1.0 - double(position - 1) / denom);
    return s;
}

class ImageFetcher {
public:
    virtual ~ImageFetcher() = default;
    virtual std::optional<std::string> fetch(const std::string& url) = 0;
};

class HttpImageFetcher : public ImageFetcher {
public:
    explicit HttpImageFetcher(HttpClient& http, size_t max_bytes = 10 * 1024 * 1024)
        : http_(http), max_bytes_(max_bytes) {}

    std::optional<std::string> fetch(const std::string& url) override {
        HttpResponse res = http_.get(url);
        if (!res.ok() || res.body.size() > max_bytes_) return std::nullopt;
        return std::move(res.body);
    }

private:
    HttpClient& http_;
    size_t max_bytes_;
};

inline void sort_scored_images(std::vector<ScoredImage>& images) {
    std::sort(images.begin(), images.end(), [](const ScoredImage& a, const ScoredImage& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.position != b.position) return a.position < b.position;
        return a.src < b.src;
    });
}

// Candidates in document order (metas first); undecodable, tiny, or extreme
// aspect images are dropped after fetching, and position/K always refer to
// the pre-filter list.
inline std::vector<ScoredImage> score_image_candidates(const std::vector<ImageCandidate>& candidates,
                                                       ImageFetcher& fetcher,
                                                       const ImageScoreParams& params = {}) {
    const size_t K = candidates.size();
    std::vector<ScoredImage> scored;
    for (const auto& c : candidates) {
        auto bytes = fetcher.fetch(c.src);
        if (!bytes || bytes->size() > params.max_bytes) continue;
        auto decoded = decode_image(*bytes);
        if (!decoded || decoded->width < 1 || decoded->height < 1) continue;
        ScoredImage s;
        s.src = c.src;
        s.is_meta = c.is_meta;
        s.position = c.position;
        s.width = decoded->width;
        s.height = decoded->height;
        s.pixel_count = long(decoded->width) * long(decoded->height);
        if (s.pixel_count < params.min_pixel_count) continue;
        double aspect = double(std::max(s.width, s.height)) / double(std::min(s.width, s.height));
        if (aspect > params.max_aspect) continue;
        s.color_count = count_colors(*decoded);
        s.score = image_score(s.is_meta, s.pixel_count, s.color_count, s.width, s.height,
                              s.position, K, params);
        scored.push_back(std::move(s));
    }
    sort_scored_images(scored);
    return scored;
}

inline std::vector<ScoredImage> score_images(const std::string& html, const std::string& base_uri,
                                             ImageFetcher& fetcher,
                                             const ImageScoreParams& params = {}) {
    MarkupDoc doc = parse_html(html);
    return score_image_candidates(enumerate_image_candidates(doc, base_uri), fetcher, params);
}

} // namespace storyweave
