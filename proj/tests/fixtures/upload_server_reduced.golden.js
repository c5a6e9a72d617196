const fs = require('fs');
const path = require('path');
function uploadFile(fileName) {

  dest = path.join("www", fileName);
  fs.createWriteStream(dest);
}
function serverHandler(request, reply) {
  uploadFile(request.payload.fileName);
}
