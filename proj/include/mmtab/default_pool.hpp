#pragma once

// Shipped instruction templates and JSON format hints. Load through
// instruct::default_pool(); the same document is a valid pool file.

namespace mmtab::instruct {

inline constexpr const char* kDefaultPoolJson = R"json({
  "templates": {
    "TSD": [
      {"id": "tsd-00", "body": "How many rows and columns does the table in this image have?\n{format_hint}"},
      {"id": "tsd-01", "body": "Determine the row number and column number of the given table."},
      {"id": "tsd-02", "body": "Count the rows and the columns of the table shown in the picture."},
      {"id": "tsd-03", "body": "What is the size of this table? Report the number of rows and the number of columns."},
      {"id": "tsd-04", "body": "Look at the table image and tell me how many rows and how many columns it contains."},
      {"id": "tsd-05", "body": "Please identify the dimensions of the table, i.e. its row count and column count."},
      {"id": "tsd-06", "body": "Examine the table carefully. How many rows does it have, and how many columns?"},
      {"id": "tsd-07", "body": "This is a table detection task: give the total number of rows and columns in the table."},
      {"id": "tsd-08", "body": "Find out the row number and the column number of the table in the image."},
      {"id": "tsd-09", "body": "Report the table size. Merged cells should be counted by the rows and columns they span."},
      {"id": "tsd-10", "body": "Given the table image, determine how many rows and columns make up the table."},
      {"id": "tsd-11", "body": "I need the number of rows and the number of columns of the displayed table."},
      {"id": "tsd-12", "body": "Analyse the structure of this table and state its row count and column count."},
      {"id": "tsd-13", "body": "Tell me the shape of the table in terms of rows and columns."},
      {"id": "tsd-14", "body": "Identify how many horizontal rows and vertical columns the table has."},
      {"id": "tsd-15", "body": "Please count every row and every column of the table, including header rows."},
      {"id": "tsd-16", "body": "What are the numbers of rows and columns in this table?"},
      {"id": "tsd-17", "body": "Based on the image, compute the table's row number and column number."},
      {"id": "tsd-18", "body": "Table size detection: output how many rows and columns the table consists of."},
      {"id": "tsd-19", "body": "Inspect the table and give its dimensions as a row count and a column count."}
    ],
    "TCE": [
      {"id": "tce-00", "body": "Extract the content of the following cells from the table: {cells}. Cells are given as (row_id, column_id)."},
      {"id": "tce-01", "body": "What is written in the table cells at positions {cells}? Positions use the format (row_id, column_id)."},
      {"id": "tce-02", "body": "Please read the cells {cells} of the table, where each position is (row_id, column_id), and return their text."},
      {"id": "tce-03", "body": "Given cell positions {cells} in the format (row_id, column_id), extract the corresponding table cells."},
      {"id": "tce-04", "body": "Return the text of the table cells located at {cells}. Row and column ids start from 1."},
      {"id": "tce-05", "body": "Look at the table image and tell me the values of the cells {cells} (row_id, column_id)."},
      {"id": "tce-06", "body": "Cell extraction task: the target positions are {cells}. Give the content of each target cell."},
      {"id": "tce-07", "body": "Identify the contents of these cells: {cells}. Each cell is referenced by (row_id, column_id)."},
      {"id": "tce-08", "body": "For each of the positions {cells}, report the text that appears in that cell of the table."},
      {"id": "tce-09", "body": "Which values are shown at the table positions {cells}? Positions are 1-based (row_id, column_id)."},
      {"id": "tce-10", "body": "Read out the cells {cells} from the table. A merged cell counts for every position it covers."},
      {"id": "tce-11", "body": "Please extract the cell text at {cells}, where the first number is the row and the second is the column."},
      {"id": "tce-12", "body": "The following (row_id, column_id) pairs point to table cells: {cells}. What do those cells contain?"},
      {"id": "tce-13", "body": "Provide the content of the table cells {cells}."},
      {"id": "tce-14", "body": "Using 1-based (row_id, column_id) coordinates, extract the cells {cells} from the table image."},
      {"id": "tce-15", "body": "Find the cells at {cells} in the table and copy their text."},
      {"id": "tce-16", "body": "Extract the corresponding table cells for the positions {cells}."},
      {"id": "tce-17", "body": "What text is in the cells {cells} of this table? Each position is written as (row_id, column_id)."},
      {"id": "tce-18", "body": "Get the values located at the cell positions {cells} of the table."},
      {"id": "tce-19", "body": "Please look up the table cells {cells}, given as (row_id, column_id), and return what they say."}
    ],
    "TCL": [
      {"id": "tcl-00", "body": "Find the positions of the following cells in the table: {cells}. Give each position as (row_id, column_id)."},
      {"id": "tcl-01", "body": "Where are these cells located in the table? {cells}. Answer with (row_id, column_id) positions."},
      {"id": "tcl-02", "body": "Locate the cells {cells} in the table image and return their (row_id, column_id) positions."},
      {"id": "tcl-03", "body": "Given the cell contents {cells}, find positions of these cells in the table."},
      {"id": "tcl-04", "body": "Please determine the row and column of each of these cells: {cells}."},
      {"id": "tcl-05", "body": "Cell locating task: the cells to locate are {cells}. Row and column ids start from 1."},
      {"id": "tcl-06", "body": "In which row and column does each of the following values appear? {cells}"},
      {"id": "tcl-07", "body": "Identify the (row_id, column_id) of the cells whose text is {cells}."},
      {"id": "tcl-08", "body": "Search the table for the cells {cells} and report where each one is."},
      {"id": "tcl-09", "body": "For every value in {cells}, give the position of the table cell that contains it."},
      {"id": "tcl-10", "body": "Return the locations of these cells in the table: {cells}. For a merged cell use its top-left position."},
      {"id": "tcl-11", "body": "Look at the table and find the cells {cells}. What are their positions?"},
      {"id": "tcl-12", "body": "Please locate {cells} in the table, using 1-based (row_id, column_id) coordinates."},
      {"id": "tcl-13", "body": "What are the positions of the cells containing {cells}?"},
      {"id": "tcl-14", "body": "Find where the following cell values are placed in the table: {cells}."},
      {"id": "tcl-15", "body": "Given these cell values: {cells}, output the row id and column id of each."},
      {"id": "tcl-16", "body": "Determine the coordinates (row_id, column_id) of the table cells {cells}."},
      {"id": "tcl-17", "body": "Which cells of the table hold the texts {cells}? Tell me their positions."},
      {"id": "tcl-18", "body": "Locate each of these values in the table image: {cells}."},
      {"id": "tcl-19", "body": "Please find positions of these cells in the table: {cells}."}
    ],
    "MCD": [
      {"id": "mcd-00", "body": "Determine whether the table contains merged cells. If so, return the positions of the top-left and bottom-right cells of each merged region."},
      {"id": "mcd-01", "body": "Does this table have any merged cells? List every merged region by its top-left and bottom-right cell."},
      {"id": "mcd-02", "body": "Check the table for merged cells and give the corner positions (row_id, column_id) of each merged region."},
      {"id": "mcd-03", "body": "Merged cell detection: find all cells that span several rows or columns."},
      {"id": "mcd-04", "body": "Are there cells in this table that span more than one row or column? Report their regions."},
      {"id": "mcd-05", "body": "Please detect merged cells in the table image and describe each one by its top-left and bottom-right positions."},
      {"id": "mcd-06", "body": "Look for merged regions in the table. For each region give the first and last cell it covers."},
      {"id": "mcd-07", "body": "Identify whether any table cells are merged, and if they are, where."},
      {"id": "mcd-08", "body": "Examine the table structure and list all merged cells with their corner coordinates."},
      {"id": "mcd-09", "body": "Does the table contain merged cells? Provide the top-left and bottom-right (row_id, column_id) of each."},
      {"id": "mcd-10", "body": "Find every merged region of the table, using 1-based row and column ids."},
      {"id": "mcd-11", "body": "Tell me whether the table has merged cells and list the regions they occupy."},
      {"id": "mcd-12", "body": "Detect the merged cells in this table. A merged cell covers a rectangle of positions."},
      {"id": "mcd-13", "body": "Which parts of the table are merged cells? Give their top-left and bottom-right positions."},
      {"id": "mcd-14", "body": "Please analyse the table and report all merged regions."},
      {"id": "mcd-15", "body": "Is any cell of this table merged across rows or columns? Report the merged regions if any."},
      {"id": "mcd-16", "body": "Determine if merged cells exist in the table and locate them."},
      {"id": "mcd-17", "body": "List the merged cells of the table by their corner cells."},
      {"id": "mcd-18", "body": "Inspect the table for cells spanning multiple rows or columns and return their regions."},
      {"id": "mcd-19", "body": "Merged cell detection task: decide whether merged cells are present and give their positions."}
    ],
    "RCE": [
      {"id": "rce-00", "body": "Extract the cells of the following target rows or columns: {cells}."},
      {"id": "rce-01", "body": "Please return all cells in {cells} of the table, from first to last."},
      {"id": "rce-02", "body": "What are the contents of {cells}? List every cell in order."},
      {"id": "rce-03", "body": "Read the table and extract the corresponding table cells in {cells}."},
      {"id": "rce-04", "body": "Row and column extraction: return the cell texts of {cells}."},
      {"id": "rce-05", "body": "Give me the full contents of {cells} of this table. A merged cell is repeated for each position it covers."},
      {"id": "rce-06", "body": "List the values in {cells} of the table image."},
      {"id": "rce-07", "body": "Please copy out every cell of {cells}."},
      {"id": "rce-08", "body": "Extract {cells} from the table, keeping the cell order."},
      {"id": "rce-09", "body": "Which texts appear in {cells}? Return them cell by cell."},
      {"id": "rce-10", "body": "Look at the table and report all cells belonging to {cells}."},
      {"id": "rce-11", "body": "Return the cell contents of the target {cells}, using 1-based ids."},
      {"id": "rce-12", "body": "I need all of the cells in {cells} of the table."},
      {"id": "rce-13", "body": "Provide the ordered cell values of {cells}."},
      {"id": "rce-14", "body": "Extract the cells located in {cells} of this table."},
      {"id": "rce-15", "body": "What does the table contain in {cells}? Give every cell."},
      {"id": "rce-16", "body": "Retrieve the cells of {cells} from the table, in their natural order."},
      {"id": "rce-17", "body": "Please output the contents of {cells}."},
      {"id": "rce-18", "body": "Read all cells in {cells} of the table shown in the image."},
      {"id": "rce-19", "body": "Target lines: {cells}. Extract every cell of each target line."}
    ],
    "TR": [
      {"id": "tr-00", "body": "Recognize the table in the image and return it in {format_name} format."},
      {"id": "tr-01", "body": "Convert the table image into a {format_name} representation."},
      {"id": "tr-02", "body": "Please write out this table as {format_name}."},
      {"id": "tr-03", "body": "Return a textual representation of the table in the format of {format_name}."},
      {"id": "tr-04", "body": "Transcribe the table shown in the picture into {format_name}, keeping merged cells."},
      {"id": "tr-05", "body": "Table recognition: output the full table as {format_name} code."},
      {"id": "tr-06", "body": "Reproduce the table in {format_name}, preserving its rows, columns and cell text."},
      {"id": "tr-07", "body": "Can you turn the table in this image into {format_name}?"},
      {"id": "tr-08", "body": "Generate {format_name} for the table in the image."},
      {"id": "tr-09", "body": "Read the table image and express it using {format_name} syntax."},
      {"id": "tr-10", "body": "Please recognize the structure and content of the table and give it in {format_name}."},
      {"id": "tr-11", "body": "Write the {format_name} source of the table displayed here."},
      {"id": "tr-12", "body": "Output the table from the image as a {format_name} table."},
      {"id": "tr-13", "body": "Parse the table in the image into {format_name}."},
      {"id": "tr-14", "body": "Provide a {format_name} version of this table."},
      {"id": "tr-15", "body": "Recreate the table below in {format_name} format, cell by cell."},
      {"id": "tr-16", "body": "Turn this table image into a {format_name} sequence."},
      {"id": "tr-17", "body": "Extract the whole table into {format_name}."},
      {"id": "tr-18", "body": "Please give the {format_name} representation of the table in the image."},
      {"id": "tr-19", "body": "Recognize this table and encode it as {format_name}."}
    ],
    "QAWrap": [
      {"id": "qa-00", "body": "Answer the question based on the table image.\nQuestion: {question}"},
      {"id": "qa-01", "body": "Look at the table and respond to the following request.\n{question}"},
      {"id": "qa-02", "body": "Using the information in the table, {question}"},
      {"id": "qa-03", "body": "Read the table carefully and answer: {question}"},
      {"id": "qa-04", "body": "This is a table understanding task.\n{question}"},
      {"id": "qa-05", "body": "Based on the given table, please handle this request: {question}"},
      {"id": "qa-06", "body": "Refer to the table image to answer the question below.\n{question}"},
      {"id": "qa-07", "body": "Here is a request about the table in the image: {question}"},
      {"id": "qa-08", "body": "Please consult the table and respond.\nRequest: {question}"},
      {"id": "qa-09", "body": "Examine the table and then answer this: {question}"},
      {"id": "qa-10", "body": "Table question: {question}"},
      {"id": "qa-11", "body": "With the help of the table, answer the following.\n{question}"},
      {"id": "qa-12", "body": "The image shows a table. {question}"},
      {"id": "qa-13", "body": "Use the table to complete the task.\nTask: {question}"},
      {"id": "qa-14", "body": "Given this table, {question}"},
      {"id": "qa-15", "body": "Study the table in the picture and respond to: {question}"},
      {"id": "qa-16", "body": "Answer using only facts from the table.\n{question}"},
      {"id": "qa-17", "body": "According to the table, {question}"},
      {"id": "qa-18", "body": "Please read the table image. {question}"},
      {"id": "qa-19", "body": "Respond to the request based on the table content: {question}"}
    ]
  },
  "hints": {
    "TSD": [
      {"id": "tsd-h0", "body": "Format the final answer as a JSON object: {\"row_number\": \"m\", \"column_number\": \"n\"}, where m and n are integers."},
      {"id": "tsd-h1", "body": "Output the final answer in JSON format with the keys \"row_number\" and \"column_number\"."},
      {"id": "tsd-h2", "body": "Give your answer as JSON, for example {\"row_number\": 5, \"column_number\": 3}."},
      {"id": "tsd-h3", "body": "Please return a JSON object {\"row_number\": ..., \"column_number\": ...} containing the two counts."},
      {"id": "tsd-h4", "body": "End your response with the JSON {\"row_number\": m, \"column_number\": n}."}
    ],
    "TCE": [
      {"id": "tce-h0", "body": "Return the final answer in JSON format: {\"answer\": [{\"position\": [row_id, column_id], \"value\": \"cell text\"}, ...]}."},
      {"id": "tce-h1", "body": "Output JSON whose \"answer\" key holds a list of objects with a \"position\" pair and the cell \"value\"."},
      {"id": "tce-h2", "body": "Format: {\"answer\": [{\"position\": [1, 2], \"value\": \"...\"}]}, one entry per requested cell in the given order."},
      {"id": "tce-h3", "body": "Answer with a JSON object {\"answer\": [...]}, where each item has \"position\" and \"value\" fields."},
      {"id": "tce-h4", "body": "Please give the result as JSON: {\"answer\": [{\"position\": [r, c], \"value\": text}, ...]}."}
    ],
    "TCL": [
      {"id": "tcl-h0", "body": "Return the final answer in JSON format: {\"answer\": [{\"value\": \"cell text\", \"position\": [row_id, column_id]}, ...]}."},
      {"id": "tcl-h1", "body": "Output JSON whose \"answer\" key lists objects with the cell \"value\" and its \"position\" pair."},
      {"id": "tcl-h2", "body": "Format: {\"answer\": [{\"value\": \"...\", \"position\": [2, 3]}]}, one entry per cell to locate."},
      {"id": "tcl-h3", "body": "Answer with a JSON object {\"answer\": [...]}, where each item has \"value\" and \"position\" fields."},
      {"id": "tcl-h4", "body": "Please give the result as JSON: {\"answer\": [{\"value\": text, \"position\": [r, c]}, ...]}."}
    ],
    "MCD": [
      {"id": "mcd-h0", "body": "Return JSON: {\"has_merged\": true or false, \"regions\": [[[top_row, left_col], [bottom_row, right_col]], ...]}; use an empty list when nothing is merged."},
      {"id": "mcd-h1", "body": "Output a JSON object with a boolean \"has_merged\" and a list \"regions\" of corner pairs [[r1, c1], [r2, c2]]."},
      {"id": "mcd-h2", "body": "Format the answer as {\"has_merged\": false, \"regions\": []} or {\"has_merged\": true, \"regions\": [[[1, 1], [2, 1]]]}."},
      {"id": "mcd-h3", "body": "Please answer in JSON with keys \"has_merged\" and \"regions\", each region given by its top-left and bottom-right positions."},
      {"id": "mcd-h4", "body": "End with JSON {\"has_merged\": ..., \"regions\": [...]} using 1-based (row_id, column_id) corners."}
    ],
    "RCE": [
      {"id": "rce-h0", "body": "Return JSON keyed by the requested lines: {\"rows\": {\"row_id\": [\"cell\", ...]}} for rows, or {\"columns\": {\"column_id\": [\"cell\", ...]}} for columns."},
      {"id": "rce-h1", "body": "Output a JSON object with a \"rows\" or \"columns\" key mapping each requested id to the list of its cells."},
      {"id": "rce-h2", "body": "Format: {\"rows\": {\"2\": [\"a\", \"b\"]}} when rows are requested and {\"columns\": {\"1\": [\"x\", \"y\"]}} when columns are requested."},
      {"id": "rce-h3", "body": "Please answer in JSON using the key \"rows\" or \"columns\"; each value lists the cells of one requested line in order."},
      {"id": "rce-h4", "body": "End with JSON such as {\"rows\": {...}} or {\"columns\": {...}}, one list of cell texts per requested id."}
    ],
    "TR": [
      {"id": "tr-h0", "body": "Put the table text inside a JSON object: {\"answer\": \"<table text>\"}."},
      {"id": "tr-h1", "body": "Return the result as JSON with a single key \"answer\" whose value is the table string."},
      {"id": "tr-h2", "body": "Format the output as {\"answer\": \"...\"}, escaping quotes and newlines inside the string."},
      {"id": "tr-h3", "body": "Please wrap the generated table in JSON: {\"answer\": table}."},
      {"id": "tr-h4", "body": "Output JSON {\"answer\": \"...\"} holding the complete table."}
    ],
    "QAWrap": [
      {"id": "qa-h0", "body": "Output the final answer in JSON format: {\"answer\": \"<your answer>\"}."},
      {"id": "qa-h1", "body": "Please end your response with a JSON object {\"answer\": ...}."},
      {"id": "qa-h2", "body": "Give the final answer as JSON with the key \"answer\"."},
      {"id": "qa-h3", "body": "Format: {\"answer\": \"...\"}. Use a list when there are several answers."},
      {"id": "qa-h4", "body": "Return {\"answer\": value} in JSON."}
    ]
  }
})json";

}  // namespace mmtab::instruct
