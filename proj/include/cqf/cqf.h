/* cqf.h: C interface to the cumulant equation engine */

#ifndef CQF_H
#define CQF_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define CQF_API __attribute__((visibility("default")))

typedef enum cqf_status {
    CQF_OK = 0,
    CQF_ERR_DOMAIN = 1,
    CQF_ERR_EVALUATION = 2,
    CQF_ERR_CAPACITY = 3,
    CQF_ERR_CLOSURE = 4,
    CQF_ERR_INTERNAL = 5,
    CQF_ERR_IO = 6,
    CQF_ERR_INTEGRATION = 7,
    CQF_ERR_NONSTATIONARY = 8,
    CQF_ERR_PARSE = 9,
    CQF_ERR_ARGUMENT = 10
} cqf_status;

typedef enum cqf_command { CQF_SOLVE = 0, CQF_CORRELATE = 1, CQF_SPECTRUM = 2 } cqf_command;

typedef struct cqf_model cqf_model;
typedef struct cqf_equations cqf_equations;
typedef struct cqf_table cqf_table;

/* Message of the last failed call on this thread; empty if none. */
CQF_API const char* cqf_last_error(void);
CQF_API const char* cqf_version(void);

CQF_API cqf_status cqf_model_load(const char* path, cqf_model** out);
CQF_API cqf_status cqf_model_parse(const char* text, cqf_model** out);
CQF_API void cqf_model_free(cqf_model* m);
CQF_API cqf_status cqf_model_print(const cqf_model* m, char** out);

CQF_API cqf_status cqf_model_set_order(cqf_model* m, const int* orders, size_t n, int use_min);
CQF_API cqf_status cqf_model_set_filter(cqf_model* m, const char* id);
CQF_API cqf_status cqf_model_set_method(cqf_model* m, const char* name);
/* Non-positive values keep the current setting. */
CQF_API cqf_status cqf_model_set_tolerances(cqf_model* m, double dt, double rtol, double atol);
CQF_API cqf_status cqf_model_set_omega(cqf_model* m, double min, double max, int count);

CQF_API cqf_status cqf_derive(const cqf_model* m, cqf_equations** out);
CQF_API cqf_status cqf_equations_load(const char* path, cqf_equations** out);
CQF_API cqf_status cqf_equations_save(const cqf_equations* e, const char* path);
CQF_API size_t cqf_equations_size(const cqf_equations* e);
CQF_API cqf_status cqf_equations_dump(const cqf_equations* e, int latex, char** out);
CQF_API void cqf_equations_free(cqf_equations* e);

/* Equations must come from the same model (derived or loaded). */
CQF_API cqf_status cqf_run(const cqf_model* m, const cqf_equations* e, cqf_command cmd, int oracle, cqf_table** out);

CQF_API size_t cqf_table_rows(const cqf_table* t);
CQF_API size_t cqf_table_columns(const cqf_table* t);
CQF_API const char* cqf_table_column_name(const cqf_table* t, size_t col);
CQF_API double cqf_table_value(const cqf_table* t, size_t row, size_t col);
CQF_API size_t cqf_table_note_count(const cqf_table* t);
CQF_API const char* cqf_table_note(const cqf_table* t, size_t i);
/* NULL path writes to standard output. */
CQF_API cqf_status cqf_table_write_csv(const cqf_table* t, const char* path);
CQF_API void cqf_table_free(cqf_table* t);

CQF_API void cqf_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
