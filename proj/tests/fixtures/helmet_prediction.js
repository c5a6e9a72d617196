import express from 'express';
import helmet from 'helmet';
import bodyParser from 'body-parser';
const app = express();
app.use(helmet());
app.use(helmet.hsts());
app.use(bodyParser.urlencoded());
